#include "gridlint/cli.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>

#include <omp.h>

#include "CLI11.hpp"

#include "gridlint/analysis.hpp"
#include "gridlint/errors.hpp"
#include "gridlint/eval.hpp"

namespace gridlint {

namespace {

// Load and usage problems; mapped to exit code 2.
struct InputError : Error {
  using Error::Error;
};

int default_jobs() {
  if (const char* env = std::getenv("GRIDLINT_JOBS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) throw InputError(std::string("GRIDLINT_JOBS must be a positive integer, got ") + env);
    return static_cast<int>(v);
  }
  return std::max(1, omp_get_num_procs());
}

Workbook load_input(const std::string& path) {
  Workbook wb = load_workbook(path);
  if (wb.sheets().empty()) throw InputError("workbook has no sheets: " + path);
  return wb;
}

void emit(const std::string& content, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << content;
  } else {
    write_file(out_path, content);
  }
}

std::string ms(double seconds) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f ms", seconds * 1000.0);
  return buf;
}

int cmd_analyze(const std::string& path, AnalysisConfig config, const std::string& out_path, std::ostream& out,
                std::ostream& err) {
  try {
    validate(config);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  Workbook wb = load_input(path);
  WorkbookAnalysis a = analyze(wb, config);
  emit(render_report(a), out_path, out);

  size_t regions = 0, fixes = 0;
  for (const auto& s : a.sheets) regions += s.regions.size(), fixes += s.fixes.size();
  err << "sheets: " << a.sheets.size() << "  regions: " << regions << "  fixes: " << fixes << "\n";
  err << "parse: " << ms(a.timings.parse) << "  vectors: " << ms(a.timings.vectors)
      << "  entropy decomposition: " << ms(a.timings.decomposition) << "  fix ranking: " << ms(a.timings.ranking)
      << "\n";
  for (const Diagnostic& d : a.diagnostics) err << d.sheet << "!" << format_a1(d.pos) << ": " << d.message << "\n";
  return kExitOk;
}

std::string file_stem(const std::string& sheet) {
  std::string s;
  for (unsigned char c : sheet) s += std::isalnum(c) || c == '-' || c == '_' ? static_cast<char>(c) : '_';
  return s.empty() ? "sheet" : s;
}

int cmd_render(const std::string& path, const std::string& out_dir, int jobs, std::ostream& err) {
  Workbook wb = load_input(path);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw WriteError("cannot create directory " + out_dir + ": " + ec.message());
  AnalysisConfig config;
  config.jobs = jobs;
  std::set<std::string> used;
  for (const Worksheet& ws : wb.sheets()) {
    SheetAnalysis s = analyze_sheet(wb, ws, config);
    std::string stem = file_stem(ws.name());
    for (int k = 2; !used.insert(stem).second; ++k) stem = file_stem(ws.name()) + "_" + std::to_string(k);
    auto file = (std::filesystem::path(out_dir) / (stem + ".html")).string();
    write_file(file, render_sheet_view(wb.name(), s));
    err << "wrote " << file << "\n";
  }
  return kExitOk;
}

int cmd_eval(const std::string& report_path, const std::string& truth_path, const std::string& out_path,
             std::ostream& out) {
  AuditSummary report = load_audit_report(report_path);
  Annotations truth = load_annotations(truth_path);
  if (report.workbook != truth.workbook) {
    throw InputError("workbook mismatch: report is for \"" + report.workbook + "\", annotations for \"" +
                     truth.workbook + "\"");
  }
  emit(eval_result_json(evaluate(report, truth)), out_path, out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Formula layout analyzer for spreadsheets", "gridlint"};
  app.require_subcommand(1);

  AnalysisConfig config;
  std::string workbook_path, out_path, format = "json", report_path, truth_path;
  int jobs = 0;
  bool no_preprocess = false;

  auto* analyze_cmd = app.add_subcommand("analyze", "Rank suspected formula errors in a workbook");
  analyze_cmd->add_option("workbook", workbook_path, "Workbook file")->required();
  analyze_cmd->add_option("--threshold", config.threshold, "Fraction of cells to flag at most")->capture_default_str();
  analyze_cmd->add_flag("--no-preprocess", no_preprocess, "Skip delimiter splitting before decomposition");
  analyze_cmd->add_option("--jobs", jobs, "Worker threads (default GRIDLINT_JOBS or all cores)");
  analyze_cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  analyze_cmd->add_option("--out", out_path, "Report file (default stdout)");

  auto* render_cmd = app.add_subcommand("render", "Write one global-view HTML page per sheet");
  render_cmd->add_option("workbook", workbook_path, "Workbook file")->required();
  render_cmd->add_option("--out", out_path, "Output directory")->required();
  render_cmd->add_option("--jobs", jobs, "Worker threads");

  auto* eval_cmd = app.add_subcommand("eval", "Score an audit report against annotations");
  eval_cmd->add_option("report", report_path, "Audit report (JSON)")->required();
  eval_cmd->add_option("annotations", truth_path, "Annotation file")->required();
  eval_cmd->add_option("--out", out_path, "Metrics file (default stdout)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("gridlint");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (jobs == 0) jobs = default_jobs();
    if (jobs < 0) throw InputError("--jobs must be at least 1");
    if (analyze_cmd->parsed()) {
      config.preprocess = !no_preprocess;
      config.jobs = jobs;
      config.format = format == "text" ? OutputFormat::Text : OutputFormat::Json;
      return cmd_analyze(workbook_path, config, out_path, out, err);
    }
    if (render_cmd->parsed()) return cmd_render(workbook_path, out_path, jobs, err);
    return cmd_eval(report_path, truth_path, out_path, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const FileNotFound& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DuplicateCell& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const WriteError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace gridlint
