// Command-line front end: generate -> validate -> preprocess -> discover ->
// check -> perf -> stats, individually or as one `pipeline` run. Every stage
// reads and writes files, so each step is independently inspectable.

#include "ocpm/activities.hpp"
#include "ocpm/conformance.hpp"
#include "ocpm/diag.hpp"
#include "ocpm/discovery.hpp"
#include "ocpm/errors.hpp"
#include "ocpm/loggen.hpp"
#include "ocpm/ocel.hpp"
#include "ocpm/performance.hpp"
#include "ocpm/preprocess.hpp"
#include "ocpm/statistics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitDomainError = 1;
constexpr int kExitUsageError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path.string());
    out << content;
}

// .csv inputs go through the tabular importer, everything else is OCEL JSON.
ocpm::OCEventLog load_log(const fs::path& path) {
    const std::string bytes = read_file(path);
    if (path.extension() == ".csv") return ocpm::import_table(bytes);
    return ocpm::parse_ocel_json(bytes);
}

struct CommonOpts {
    std::string input;
    std::string out = ".";
    std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needsInput = true) {
    if (needsInput) {
        cmd->add_option("--input", opts.input, "input log (.json OCEL or .csv table)")
            ->required();
    }
    cmd->add_option("--out", opts.out, "output directory");
    cmd->add_option("--format", opts.format, "additional output format")
        ->check(CLI::IsMember({"json", "csv", "dot"}));
}

std::vector<ocpm::conformance::ComplianceRule> load_rules(const std::string& rulesArg) {
    if (rulesArg.empty() || rulesArg == "default") {
        return ocpm::conformance::default_rules();
    }
    return ocpm::conformance::rules_from_json(read_file(rulesArg));
}

void run_generate(const std::string& configPath, std::optional<std::uint64_t> seed,
                  const fs::path& outDir) {
    ocpm::loggen::GenConfig config;
    if (!configPath.empty()) config = ocpm::loggen::GenConfig::from_json(read_file(configPath));
    if (seed.has_value()) config.seed = *seed;
    const auto result = ocpm::loggen::generate(config);
    write_file(outDir / "log.ocel.json", ocpm::serialize_ocel_json(result.log));
    write_file(outDir / "truth.json", result.truth.to_json());
    write_file(outDir / "genconfig.json", config.to_json());
    ocpm::diag::info("generated " + std::to_string(result.log.events().size()) + " events");
}

int run_validate(const fs::path& input) {
    const auto log = load_log(input);
    const auto summary = ocpm::stats::log_summary(log);
    std::cout << "valid: " << summary.eventCount << " events";
    for (const auto& [otype, count] : summary.objectCounts) {
        std::cout << ", " << count << " " << otype;
    }
    std::cout << "\n";
    return kExitOk;
}

void run_preprocess(const ocpm::OCEventLog& log, const std::string& configPath,
                    const fs::path& outDir) {
    auto config = configPath.empty() ? ocpm::preprocess::PreprocessConfig::defaults()
                                     : ocpm::preprocess::PreprocessConfig::from_json(
                                           read_file(configPath));
    const auto result = ocpm::preprocess::run_pipeline(log, config);
    write_file(outDir / "preprocessed.ocel.json", ocpm::serialize_ocel_json(result.log));
    write_file(outDir / "preprocess_report.json", ocpm::preprocess::report_json(result));
}

void run_discover(const ocpm::OCEventLog& log, std::uint64_t minEdgeFreq,
                  const std::string& format, const fs::path& outDir) {
    const auto ocdfg = ocpm::discovery::discover_ocdfg(log);
    const auto ocpn = ocpm::discovery::assemble_ocpn(ocdfg);
    write_file(outDir / "ocdfg.json", ocpm::discovery::to_json(ocdfg));
    write_file(outDir / "ocpn.json", ocpm::discovery::to_json(ocpn));
    if (format == "dot") {
        write_file(outDir / "ocdfg.dot", ocpm::discovery::export_dot(ocdfg, minEdgeFreq));
        write_file(outDir / "ocpn.dot", ocpm::discovery::export_dot(ocpn));
    }
}

void run_check(const ocpm::OCEventLog& log, const std::string& rulesArg, const fs::path& outDir) {
    const auto rules = load_rules(rulesArg);
    const auto reports = ocpm::conformance::check_all(log, rules);
    write_file(outDir / "violations.json", ocpm::conformance::reports_to_json(reports));
}

void run_perf(const ocpm::OCEventLog& log, const std::string& format, const fs::path& outDir) {
    const auto bundle = ocpm::perf::compute_all(log);
    write_file(outDir / "performance.json", ocpm::perf::to_json(bundle));
    if (format == "csv") {
        const auto dump = [&](const ocpm::perf::PerfStat& stat) {
            write_file(outDir / (stat.metric + ".csv"), ocpm::perf::records_csv(stat));
        };
        dump(bundle.transit);
        dump(bundle.lagging.stat);
        dump(bundle.scheduleHours.overworkStat);
        dump(bundle.dailyHours);
        dump(bundle.transitShare.stat);
        dump(bundle.accumulated);
        dump(bundle.cascade.stat);
    }
}

void run_stats(const ocpm::OCEventLog& log, const std::string& format, const fs::path& outDir) {
    const auto summary = ocpm::stats::log_summary(log);
    write_file(outDir / "summary.json", ocpm::stats::to_json(summary));
    const bool hasRegions = log.hasType(ocpm::activities::kScheduleType) ||
                            log.hasType(ocpm::activities::kTechnicianType);
    if (hasRegions) {
        const auto regions = ocpm::stats::region_distribution(log);
        write_file(outDir / "regions.json", ocpm::stats::to_json(regions));
        if (format == "csv") {
            write_file(outDir / "regions.csv", ocpm::stats::region_csv(regions));
        }
    }
}

void run_full_pipeline(const fs::path& input, const std::string& preConfigPath,
                       const std::string& rulesArg, std::uint64_t minEdgeFreq,
                       const std::string& format, const fs::path& outDir) {
    ordered_json stageSummary = ordered_json::array();
    auto snapshot = [](const char* name, const ocpm::OCEventLog& log) {
        ordered_json j = ordered_json::object();
        j["stage"] = name;
        j["events"] = log.events().size();
        ordered_json jObjects = ordered_json::object();
        for (const auto& otype : log.objectTypes()) {
            jObjects[otype] = log.oidsOfType(otype).size();
        }
        j["objects"] = std::move(jObjects);
        return j;
    };

    const auto raw = load_log(input);
    stageSummary.push_back(snapshot("validate", raw));
    write_file(outDir / "summary_raw.json", ocpm::stats::to_json(ocpm::stats::log_summary(raw)));

    auto preConfig = preConfigPath.empty()
                         ? ocpm::preprocess::PreprocessConfig::defaults()
                         : ocpm::preprocess::PreprocessConfig::from_json(read_file(preConfigPath));
    auto preprocessed = ocpm::preprocess::run_pipeline(raw, preConfig);
    write_file(outDir / "preprocessed.ocel.json", ocpm::serialize_ocel_json(preprocessed.log));
    write_file(outDir / "preprocess_report.json", ocpm::preprocess::report_json(preprocessed));
    {
        auto j = snapshot("preprocess", preprocessed.log);
        ordered_json jRemoved = ordered_json::object();
        for (const auto& stage : preprocessed.stages) {
            ordered_json jStage = ordered_json::object();
            for (const auto& [otype, oids] : stage.removedObjects) {
                jStage[otype] = oids.size();
            }
            jRemoved[stage.name] = std::move(jStage);
        }
        j["removedObjects"] = std::move(jRemoved);
        stageSummary.push_back(std::move(j));
    }
    const ocpm::OCEventLog& log = preprocessed.log;

    run_discover(log, minEdgeFreq, format, outDir);
    stageSummary.push_back(snapshot("discover", log));
    run_check(log, rulesArg, outDir);
    stageSummary.push_back(snapshot("check", log));
    run_perf(log, format, outDir);
    stageSummary.push_back(snapshot("perf", log));
    run_stats(log, format, outDir);
    stageSummary.push_back(snapshot("stats", log));

    ordered_json doc = ordered_json::object();
    doc["stages"] = std::move(stageSummary);
    write_file(outDir / "pipeline_summary.json", doc.dump(2) + "\n");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"object-centric process mining toolkit"};
    app.require_subcommand(1);

    // generate
    auto* cmdGen = app.add_subcommand("generate", "emit a synthetic after-sales OCEL log");
    std::string genConfigPath;
    std::string genOut = ".";
    std::optional<std::uint64_t> genSeed;
    cmdGen->add_option("--config", genConfigPath, "generator config JSON");
    cmdGen->add_option("--seed", genSeed, "override the config seed");
    cmdGen->add_option("--out", genOut, "output directory");

    // validate
    auto* cmdValidate = app.add_subcommand("validate", "parse a log and check its invariants");
    CommonOpts valOpts;
    cmdValidate->add_option("--input", valOpts.input, "input log")->required();

    // preprocess
    auto* cmdPre = app.add_subcommand("preprocess", "apply the cleaning filters");
    CommonOpts preOpts;
    std::string preConfigPath;
    add_common(cmdPre, preOpts);
    cmdPre->add_option("--config", preConfigPath, "preprocess config JSON");

    // discover
    auto* cmdDiscover = app.add_subcommand("discover", "mine the OCDFG and assemble the OCPN");
    CommonOpts discOpts;
    std::uint64_t minEdgeFreq = 0;
    add_common(cmdDiscover, discOpts);
    cmdDiscover->add_option("--min-edge-freq", minEdgeFreq,
                            "prune DOT edges below this frequency (display only)");

    // check
    auto* cmdCheck = app.add_subcommand("check", "evaluate compliance rules");
    CommonOpts checkOpts;
    std::string rulesArg = "default";
    add_common(cmdCheck, checkOpts);
    cmdCheck->add_option("--rules", rulesArg, "rule file JSON, or \"default\"");

    // perf
    auto* cmdPerf = app.add_subcommand("perf", "compute performance metrics");
    CommonOpts perfOpts;
    add_common(cmdPerf, perfOpts);

    // stats
    auto* cmdStats = app.add_subcommand("stats", "explorative statistics");
    CommonOpts statsOpts;
    add_common(cmdStats, statsOpts);

    // pipeline
    auto* cmdPipeline = app.add_subcommand("pipeline", "run every stage in order");
    CommonOpts pipeOpts;
    std::string pipePreConfig;
    std::string pipeRules = "default";
    std::uint64_t pipeMinEdgeFreq = 0;
    add_common(cmdPipeline, pipeOpts);
    cmdPipeline->add_option("--config", pipePreConfig, "preprocess config JSON");
    cmdPipeline->add_option("--rules", pipeRules, "rule file JSON, or \"default\"");
    cmdPipeline->add_option("--min-edge-freq", pipeMinEdgeFreq, "DOT display pruning");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsageError;
    }

    try {
        if (cmdGen->parsed()) {
            run_generate(genConfigPath, genSeed, genOut);
        } else if (cmdValidate->parsed()) {
            return run_validate(valOpts.input);
        } else if (cmdPre->parsed()) {
            run_preprocess(load_log(preOpts.input), preConfigPath, preOpts.out);
        } else if (cmdDiscover->parsed()) {
            run_discover(load_log(discOpts.input), minEdgeFreq, discOpts.format, discOpts.out);
        } else if (cmdCheck->parsed()) {
            run_check(load_log(checkOpts.input), rulesArg, checkOpts.out);
        } else if (cmdPerf->parsed()) {
            run_perf(load_log(perfOpts.input), perfOpts.format, perfOpts.out);
        } else if (cmdStats->parsed()) {
            run_stats(load_log(statsOpts.input), statsOpts.format, statsOpts.out);
        } else if (cmdPipeline->parsed()) {
            run_full_pipeline(pipeOpts.input, pipePreConfig, pipeRules, pipeMinEdgeFreq,
                              pipeOpts.format, pipeOpts.out);
        }
    } catch (const UsageError& e) {
        std::cerr << "ocpm: error: " << e.what() << "\n";
        return kExitUsageError;
    } catch (const ocpm::Error& e) {
        std::cerr << "ocpm: error: " << e.what() << "\n";
        return kExitDomainError;
    } catch (const std::exception& e) {
        std::cerr << "ocpm: unexpected error: " << e.what() << "\n";
        return kExitDomainError;
    }
    return kExitOk;
}
