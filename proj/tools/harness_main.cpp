// srlkit-harness: run learner scripts, summarise conditions, validate packs.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "srl/assessment.hpp"
#include "srl/content.hpp"
#include "srl/error.hpp"
#include "srl/harness.hpp"

namespace fs = std::filesystem;

namespace {

struct Job {
  srl::LearnerScript script;
  std::int64_t seed = 0;
};

struct Outcome {
  std::string name;
  srl::RunResult result;
  std::string error;
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

int cmd_run(const std::vector<std::string>& scripts, const std::string& pack_path, std::optional<std::int64_t> seed,
            int runs, const std::string& out_dir, const std::string& remote, int parallel,
            const std::string& instrument_dir) {
  auto pack = std::make_shared<const srl::ContentPack>(srl::load_pack(pack_path));
  std::map<std::string, srl::Instrument> instruments;
  if (!instrument_dir.empty()) instruments = srl::load_instruments(instrument_dir);

  std::vector<Job> jobs;
  for (const auto& path : scripts) {
    auto script = srl::load_script(path);
    srl::validate_script(script, *pack);
    const auto base = seed.value_or(script.seed);
    for (int r = 0; r < runs; ++r) jobs.push_back({script, base + r});
  }

  std::vector<Outcome> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      const auto& job = jobs[i];
      auto& o = outcomes[i];
      o.name = job.script.script_id + "-seed" + std::to_string(job.seed);
      try {
        if (remote.empty()) {
          o.result = srl::run_script(job.script, pack, job.seed, instruments);
        } else {
          srl::HttpDriver driver(remote);
          o.result = srl::run_script(job.script, *pack, job.seed, driver);
        }
      } catch (const std::exception& e) {
        o.error = e.what();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::clamp(parallel, 1, 64));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(threads, jobs.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  fs::create_directories(out_dir);
  std::string csv = srl::report_csv_header() + "\n";
  int status = 0;
  for (const auto& o : outcomes) {
    if (!o.error.empty()) {
      std::cerr << o.name << ": " << o.error << "\n";
      status = 1;
      continue;
    }
    const auto& rep = o.result.report;
    write_file(fs::path(out_dir) / (o.name + ".report.json"), srl::session_report_to_json(rep).dump(2) + "\n");
    write_file(fs::path(out_dir) / (o.name + ".events.jsonl"), o.result.events_jsonl);
    for (const auto& a : rep.assessments) csv += srl::report_csv_row(a) + "\n";
    std::cout << o.name << " session=" << rep.session_id << " stage=" << rep.final_stage
              << " completion=" << rep.completion_rate << " seconds=" << rep.total_seconds
              << (o.result.ok() ? " checks=ok" : " checks=FAILED") << "\n";
    for (const auto& f : o.result.check_failures) {
      std::cerr << o.name << ": check failed: " << f << "\n";
      status = 1;
    }
  }
  write_file(fs::path(out_dir) / "scores.csv", csv);
  return status;
}

int cmd_compare(const std::vector<std::string>& inputs, const std::string& out_path) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::directory_iterator(in)) {
        const auto name = e.path().filename().string();
        if (name.size() > 12 && name.ends_with(".report.json")) files.push_back(e.path());
      }
    } else {
      files.emplace_back(in);
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<srl::SessionReport> reports;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw srl::Error(srl::ErrorCode::IoError, "cannot open " + f.string());
    reports.push_back(srl::session_report_from_json(nlohmann::json::parse(in)));
  }
  const auto csv = srl::summary_csv(srl::compare_conditions(reports));
  if (out_path.empty() || out_path == "-") {
    std::cout << csv;
  } else {
    write_file(out_path, csv);
  }
  return 0;
}

int cmd_validate(const std::vector<std::string>& packs, const std::vector<std::string>& scripts) {
  int status = 0;
  for (const auto& path : packs) {
    try {
      const auto pack = srl::load_pack(path);
      std::cout << path << ": ok (" << pack.tasks.size() << " tasks, " << pack.subtask_count() << " subtasks)\n";
      for (const auto& s : scripts) {
        srl::validate_script(srl::load_script(s), pack);
        std::cout << s << ": ok against " << pack.pack_id << "\n";
      }
    } catch (const srl::Error& e) {
      std::cout << path << ": " << srl::to_string(e.code()) << ": " << e.what() << "\n";
      status = 1;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scripted learner harness"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run learner scripts and export reports");
  std::vector<std::string> scripts;
  std::string pack_path, out_dir = "harness-out", remote, instrument_dir;
  std::optional<std::int64_t> seed;
  int runs = 1, parallel = 1;
  run->add_option("--script", scripts, "Learner script JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--pack", pack_path, "Content pack JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Seed; defaults to the script's own");
  run->add_option("--runs", runs, "Runs per script with consecutive seeds")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--remote", remote, "Base URL of a running srlkit-server");
  run->add_option("--parallel", parallel, "Concurrent sessions")->check(CLI::PositiveNumber);
  run->add_option("--instruments", instrument_dir, "Instrument directory for assess actions")
      ->check(CLI::ExistingDirectory);

  auto* compare = app.add_subcommand("compare", "Per-condition mean and SD over session reports");
  std::vector<std::string> inputs;
  std::string compare_out;
  compare->add_option("--in", inputs, "Report files or directories")->required();
  compare->add_option("--out", compare_out, "CSV output path, '-' for stdout");

  auto* validate = app.add_subcommand("validate", "Check content packs (and scripts against them)");
  std::vector<std::string> packs, check_scripts;
  validate->add_option("--pack", packs, "Content pack JSON")->required();
  validate->add_option("--script", check_scripts, "Scripts to check against each pack");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(scripts, pack_path, seed, runs, out_dir, remote, parallel, instrument_dir);
    if (*compare) return cmd_compare(inputs, compare_out);
    if (*validate) return cmd_validate(packs, check_scripts);
  } catch (const srl::Error& e) {
    std::cerr << srl::to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}
