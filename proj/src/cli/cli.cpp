/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * This file is part of pufstat, a statistics toolkit for ring-oscillator
 * PUF frequency datasets.
 */

#include "pufstat/cli.hpp"

#include "pufstat/bias_entropy.hpp"
#include "pufstat/core_data.hpp"
#include "pufstat/correlation.hpp"
#include "pufstat/covfit.hpp"
#include "pufstat/io.hpp"
#include "pufstat/normality.hpp"
#include "pufstat/pca.hpp"
#include "pufstat/similarity.hpp"
#include "pufstat/syngen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

namespace pufstat::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string dataset;
    std::string layout = "dir";
    std::string meta;
    std::string geometry = "16x32:col";
    std::string out;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

/// One subcommand's output directory plus its manifest.
class Run {
public:
    Run(const Globals &g, std::string subcommand, json params, json inputs)
        : dir_(fs::path(g.out) / subcommand) {
        manifest_["tool"] = "pufstat";
        manifest_["version"] = kToolVersion;
        manifest_["subcommand"] = std::move(subcommand);
        manifest_["params"] = std::move(params);
        manifest_["inputs"] = std::move(inputs);
        hash_ = sha256_hex(manifest_.dump());
        fs::create_directories(dir_);
    }

    const std::string &hash() const { return hash_; }
    const fs::path &dir() const { return dir_; }

    std::string header(std::string_view units) const {
        return "# pufstat manifest=" + hash_ + " units: " + std::string(units) + "\n";
    }

    void text(const std::string &name, std::string_view units, const std::string &body) {
        emit(name, header(units) + body);
    }

    void summary(json body, std::string_view units) {
        body["manifest"] = hash_;
        body["units"] = units;
        emit("summary.json", body.dump(2) + "\n");
    }

    void binary(const std::string &name, std::span<const std::uint8_t> bytes) {
        atomic_write(dir_ / name, bytes);
        std::string_view view(reinterpret_cast<const char *>(bytes.data()), bytes.size());
        files_[name] = sha256_hex(view);
    }

    /// A file without the comment header, for JSON documents.
    void document(const std::string &name, const std::string &contents) {
        emit(name, contents);
    }

    void finish() {
        json m;
        m["manifest"] = manifest_;
        m["hash"] = hash_;
        m["files"] = files_;
        atomic_write(dir_ / "manifest.json", m.dump(2) + "\n");
        std::cout << "wrote " << dir_.string() << " (manifest " << hash_.substr(0, 12)
                  << ")\n";
    }

private:
    void emit(const std::string &name, const std::string &contents) {
        atomic_write(dir_ / name, contents);
        files_[name] = sha256_hex(contents);
    }

    fs::path dir_;
    json manifest_;
    std::string hash_;
    std::map<std::string, std::string> files_;
};

struct Inputs {
    ReadingsTensor readings;
    std::optional<DeviceMeta> meta;
    json description;
};

std::string tensor_hash(const ReadingsTensor &r) {
    const auto &v = r.raw();
    std::string bytes(reinterpret_cast<const char *>(v.data()), v.size() * sizeof(double));
    bytes += "|" + std::to_string(r.num_devices()) + "x" + std::to_string(r.num_ros()) + "x" +
             std::to_string(r.num_samples());
    return sha256_hex(bytes);
}

Inputs load_inputs(const Globals &g) {
    fs::path dataset = g.dataset;
    fs::path meta = g.meta;
    std::string layout = g.layout;
    if (dataset.empty()) {
        // Fall back to a dataset produced by `synth` in the same output root.
        const fs::path synth = fs::path(g.out) / "synth";
        if (!fs::exists(synth / "dataset"))
            throw UsageError("--dataset is required (no synthetic dataset under " +
                             synth.string() + ")");
        dataset = synth / "dataset";
        layout = "dir";
        if (meta.empty() && fs::exists(synth / "meta.csv"))
            meta = synth / "meta.csv";
    }
    Inputs in{load_readings(dataset, Layout::parse(layout)), std::nullopt, json::object()};
    in.description["dataset"] = dataset.string();
    in.description["layout"] = Layout::parse(layout).describe();
    in.description["readings_sha256"] = tensor_hash(in.readings);
    in.description["shape"] = {in.readings.num_devices(), in.readings.num_ros(),
                               in.readings.num_samples()};
    if (!meta.empty()) {
        in.meta = load_meta(meta, in.readings.num_devices());
        in.description["meta"] = meta.string();
        in.description["meta_sha256"] = sha256_hex(read_file(meta));
    }
    return in;
}

std::uint64_t require_seed(const Globals &g, std::string_view sub) {
    if (!g.seed)
        throw UsageError(std::string(sub) + " needs an explicit --seed");
    return *g.seed;
}

std::vector<std::size_t> parse_counts(const std::string &spec, std::string_view what) {
    std::vector<std::size_t> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        std::size_t value = 0;
        const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (ec != std::errc{} || p != item.data() + item.size())
            throw UsageError("bad " + std::string(what) + " entry '" + item + "'");
        out.push_back(value);
    }
    if (out.empty())
        throw UsageError(std::string(what) + " list is empty");
    return out;
}

// ---------------------------------------------------------------- ingest

void cmd_ingest(const Globals &g) {
    const Inputs in = load_inputs(g);
    const PufMatrices m = build_matrices(in.readings);
    Run run(g, "ingest", json::object(), in.description);
    auto matrix_text = [&](const auto &mat) {
        std::ostringstream os;
        write_matrix_csv(os, mat);
        return os.str();
    };
    run.text("F.csv", "MHz", matrix_text(m.freq));
    run.text("D.csv", "MHz", matrix_text(m.dev));
    run.text("B.csv", "MHz", matrix_text(m.diff));
    run.text("R.csv", "bit", matrix_text(m.bits));
    const bool packable = m.bits.rows() % 8 == 0;
    if (packable)
        run.binary("bits.bin", pack_bits(m.bits));
    json s;
    s["devices"] = in.readings.num_devices();
    s["ros"] = in.readings.num_ros();
    s["samples"] = in.readings.num_samples();
    s["pairs"] = m.bits.rows();
    s["bits_file"] = packable ? json("bits.bin") : json(nullptr);
    s["bits_bytes"] = packable ? m.bits.values.size() / 8 : 0;
    s["bit_order"] = "column order (device outer, pair inner), first pair in the MSB";
    run.summary(s, "frequencies in MHz; bits.bin is raw bytes");
    run.finish();
}

// ------------------------------------------------------------- normality

json ad_summary_json(const normality::ADSummary &s) {
    return {{"q50", s.quantile_50}, {"q90", s.quantile_90}, {"q99", s.quantile_99},
            {"max", s.max},         {"rejected", s.rejected}, {"rows", s.rows}};
}

void cmd_normality(const Globals &g, const std::string &which, std::size_t min_samples) {
    const Inputs in = load_inputs(g);
    const PufMatrices m = build_matrices(in.readings);
    Run run(g, "normality", {{"matrix", which}, {"min_samples", min_samples}},
            in.description);
    normality::ADOptions opts;
    opts.min_samples = min_samples;
    json table = json::object();
    const std::vector<std::pair<std::string, const Matrix *>> all{
        {"F", &m.freq.values}, {"D", &m.dev.values}, {"B", &m.diff.values}};
    for (const auto &[name, mat] : all) {
        if (which != "all" && which != name)
            continue;
        const auto r = normality::test_rows(*mat, opts, g.threads);
        std::string body = "row,a2,a2_star,reject\n";
        for (const auto &row : r.rows)
            body += std::to_string(row.row_index) + "," + format_double(row.a2) + "," +
                    format_double(row.a2_star) + "," + (row.reject_at_1pct ? "1" : "0") +
                    "\n";
        run.text("normality_" + name + ".csv", "dimensionless", body);
        table[name] = ad_summary_json(r.summary);
    }
    json s;
    s["table"] = table;
    s["critical_value_1pct"] = normality::kCriticalValue1Pct;
    s["quantile_method"] = "nearest rank";
    run.summary(s, "dimensionless (corrected Anderson-Darling statistic)");
    run.finish();
}

// ------------------------------------------------------------ similarity

void cmd_similarity(const Globals &g, const std::string &sizes, std::size_t min_group) {
    const Inputs in = load_inputs(g);
    const PufMatrices m = build_matrices(in.readings);
    const auto groups = parse_counts(sizes, "--group-size");
    Run run(g, "similarity", {{"group_sizes", groups}, {"min_group", min_group}},
            in.description);
    const auto map = similarity::group_variance_map(m.dev, min_group);
    std::string body = "a,b,s2\n";
    for (std::size_t a = 0; a < map.num_devices(); ++a)
        for (std::size_t b = a; b < map.num_devices(); ++b)
            if (map.contains(a, b))
                body += std::to_string(a) + "," + std::to_string(b) + "," +
                        format_double(map.at(a, b)) + "\n";
    run.text("group_variance.csv", "MHz^2", body);

    json s;
    if (in.meta) {
        std::string corr = "group_size,corr\n";
        json values = json::object();
        for (std::size_t gsize : groups) {
            const double r = similarity::serial_correlation(map, in.meta, gsize);
            corr += std::to_string(gsize) + "," + format_double(r) + "\n";
            values[std::to_string(gsize)] = r;
        }
        run.text("serial_corr.csv", "dimensionless", corr);
        s["serial_correlation"] = values;
    } else {
        std::cerr << "note: no --meta given, serial correlation skipped\n";
        s["serial_correlation"] = nullptr;
        s["serial_correlation_reason"] = "no device metadata";
    }
    run.summary(s, "s2 in MHz^2; correlations dimensionless");
    run.finish();
}

// --------------------------------------------------------------- entropy

void cmd_entropy(const Globals &g) {
    const Inputs in = load_inputs(g);
    const PufMatrices m = build_matrices(in.readings);
    Run run(g, "entropy", json::object(), in.description);
    const auto r = bias::analyze(m.diff, m.bits);
    std::string body = "k,p_binary,p_normal\n";
    for (std::size_t k = 0; k < r.p_binary.size(); ++k)
        body += std::to_string(k) + "," + format_double(r.p_binary[k]) + "," +
                format_double(r.p_normal[k]) + "\n";
    run.text("bias.csv", "probability", body);

    const auto hb = bias::bias_histogram(r.p_binary);
    const auto hn = bias::bias_histogram(r.p_normal);
    std::string hist = "# bias_low bias_high count_binary count_normal\n";
    for (std::size_t b = 0; b < bias::kHistogramBins; ++b)
        hist += format_double(0.1 * static_cast<double>(b) - 0.5) + " " +
                format_double(0.1 * static_cast<double>(b + 1) - 0.5) + " " +
                std::to_string(hb[b]) + " " + std::to_string(hn[b]) + "\n";
    run.text("bias_hist.dat", "bias (p - 0.5), counts of pairs", hist);

    const auto devices = static_cast<std::size_t>(m.bits.cols());
    std::string keys = "device,logprob_binary,logprob_normal\n";
    std::vector<std::uint8_t> key(static_cast<std::size_t>(m.bits.rows()));
    for (std::size_t j = 0; j < devices; ++j) {
        for (std::size_t k = 0; k < key.size(); ++k)
            key[k] = m.bits(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
        keys += std::to_string(j) + "," +
                format_double(bias::key_logprob(key, r.p_binary, devices)) + "," +
                format_double(bias::key_logprob(key, r.p_normal, devices)) + "\n";
    }
    run.text("key_logprob.csv", "log2 probability (bits)", keys);

    json s;
    s["h_binary"] = r.h_binary;
    s["h_normal"] = r.h_normal;
    s["pairs"] = m.bits.rows();
    s["devices"] = devices;
    s["normal_convention"] = r.normal_convention;
    run.summary(s, "entropy in bits");
    run.finish();
}

// ------------------------------------------------------------- correlate

void cmd_correlate(const Globals &g) {
    const Inputs in = load_inputs(g);
    const PufMatrices m = build_matrices(in.readings);
    Run run(g, "correlate", json::object(), in.description);
    json s;
    const std::vector<std::pair<std::string, const Matrix *>> all{{"D", &m.dev.values},
                                                                  {"B", &m.diff.values}};
    for (const auto &[name, mat] : all) {
        const auto p = correlation::profile(*mat, std::nullopt, g.threads);
        std::string body = "# index corr\n";
        for (std::size_t i = 0; i < p.coefficients.size(); ++i)
            body += std::to_string(i) + " " + format_double(p.coefficients[i]) + "\n";
        run.text("coco_" + name + ".dat", "dimensionless", body);
        // The reference row correlates with itself; leave it out of the slope.
        std::vector<double> rest;
        for (std::size_t i = 0; i < p.coefficients.size(); ++i)
            if (i != p.reference_index)
                rest.push_back(p.coefficients[i]);
        s["reference_" + name] = p.reference_index;
        s["slope_" + name] = correlation::index_slope(rest);
    }
    run.summary(s, "correlation per row index");
    run.finish();
}

// ---------------------------------------------------------------- attack

struct AttackArgs {
    std::string counts = "0,32,64,96,128,160,192,224";
    std::string mode = "both";
    std::size_t devices = 8;
    std::string selection = "even";
    double trend_magnitude = 1.0;
};

void cmd_attack(const Globals &g, const AttackArgs &a) {
    const std::uint64_t seed = require_seed(g, "attack");
    const auto counts = parse_counts(a.counts, "--fixed-counts");
    std::vector<covfit::FixMode> modes;
    if (a.mode == "both")
        modes = {covfit::FixMode::Trend, covfit::FixMode::Exact};
    else
        modes = {covfit::parse_mode(a.mode)};
    const Inputs in = load_inputs(g);
    const PufMatrices m = build_matrices(in.readings);
    const auto targets =
        covfit::choose_devices(static_cast<std::size_t>(m.diff.cols()), a.devices, seed);
    Run run(g, "attack",
            {{"fixed_counts", counts},
             {"mode", a.mode},
             {"devices", a.devices},
             {"selection", a.selection},
             {"trend_magnitude", a.trend_magnitude},
             {"seed", seed}},
            in.description);

    covfit::AttackOptions opts;
    opts.fixed_counts = counts;
    opts.selection =
        a.selection == "random" ? covfit::Selection::Random : covfit::Selection::Even;
    opts.seed = seed;
    opts.trend_magnitude = a.trend_magnitude;
    opts.threads = g.threads;

    std::vector<covfit::AttackCell> cells;
    for (std::size_t device : targets)
        for (auto mode : modes) {
            opts.mode = mode;
            auto part = covfit::evaluate_attack(m.diff, device, opts);
            cells.insert(cells.end(), part.begin(), part.end());
        }

    std::string body = "device,mode,fixed_count,delta_correct,objective,iterations\n";
    std::size_t failed = 0;
    for (const auto &c : cells) {
        if (!c.ok) {
            ++failed;
            std::cerr << "attack cell device " << c.device << " " << covfit::mode_name(c.mode)
                      << " m=" << c.fixed_count << " failed: " << c.error << "\n";
            body += std::to_string(c.device) + "," + std::string(covfit::mode_name(c.mode)) +
                    "," + std::to_string(c.fixed_count) + ",,,\n";
            continue;
        }
        body += std::to_string(c.device) + "," + std::string(covfit::mode_name(c.mode)) + "," +
                std::to_string(c.fixed_count) + "," + std::to_string(c.delta_correct) + "," +
                format_double(c.objective) + "," + std::to_string(c.iterations) + "\n";
    }
    run.text("attack.csv", "delta_correct in bits; objective in MHz^4", body);

    const auto env = covfit::envelope(cells);
    std::string dat = "# mode fixed_count min max mean_abs cells\n";
    json envelope = json::array();
    for (const auto &p : env) {
        dat += std::string(covfit::mode_name(p.mode)) + " " + std::to_string(p.fixed_count) +
               " " + std::to_string(p.min) + " " + std::to_string(p.max) + " " +
               format_double(p.mean_abs) + " " + std::to_string(p.cells) + "\n";
        envelope.push_back({{"mode", covfit::mode_name(p.mode)},
                            {"fixed_count", p.fixed_count},
                            {"min", p.min},
                            {"max", p.max},
                            {"mean_abs", p.mean_abs},
                            {"cells", p.cells}});
    }
    run.text("envelope.dat", "bits", dat);
    json s;
    s["devices"] = targets;
    s["envelope"] = envelope;
    s["failed_cells"] = failed;
    run.summary(s, "delta_correct in bits");
    run.finish();
}

// ------------------------------------------------------------------- pca

void cmd_pca(const Globals &g, const std::string &pcs_spec, const std::string &ranks_spec,
             std::size_t bins) {
    const Inputs in = load_inputs(g);
    const PufMatrices m = build_matrices(in.readings);
    const ChipGeometry geometry = ChipGeometry::parse(g.geometry);
    const auto pcs = parse_counts(pcs_spec, "--pcs");
    const auto ranks = parse_counts(ranks_spec, "--ranks");
    Run run(g, "pca",
            {{"pcs", pcs}, {"ranks", ranks}, {"bins", bins}, {"geometry", geometry.describe()}},
            in.description);
    const auto scaled = pca::standardize(m.freq);
    const auto r = pca::pca(scaled, geometry);

    std::string fr = "pc,singular_value,fraction\n";
    for (Eigen::Index k = 0; k < r.singular_values.size(); ++k)
        fr += std::to_string(k + 1) + "," + format_double(r.singular_values(k)) + "," +
              format_double(r.variance_fractions(k)) + "\n";
    run.text("pca_fractions.csv", "fraction of total variance", fr);

    json corr = json::object();
    for (std::size_t pc : pcs) {
        const Matrix grid = pca::loading_map(r, pc, geometry);
        std::string map = "# x y loading\n";
        for (Eigen::Index x = 0; x < grid.cols(); ++x) {
            for (Eigen::Index y = 0; y < grid.rows(); ++y)
                map += std::to_string(x) + " " + std::to_string(y) + " " +
                       format_double(grid(y, x)) + "\n";
            map += "\n";
        }
        run.text("loading_pc" + std::to_string(pc) + ".dat", "chip grid position, loading",
                 map);
        const auto h = pca::score_histogram(r, pc, bins);
        std::string hist = "# score_low score_high count\n";
        for (std::size_t b = 0; b < h.counts.size(); ++b)
            hist += format_double(h.low + h.width * static_cast<double>(b)) + " " +
                    format_double(h.low + h.width * static_cast<double>(b + 1)) + " " +
                    std::to_string(h.counts[b]) + "\n";
        run.text("scores_hist_pc" + std::to_string(pc) + ".dat", "score (standardized units)",
                 hist);
        corr[std::to_string(pc)] = pca::pc_key_correlation(r, m.bits, pc);
    }

    std::string tr = "r,agreement\n";
    json agreement = json::object();
    for (std::size_t rank : ranks) {
        const std::size_t rr = rank == 0 ? r.components() : rank;
        const auto t = pca::truncated_bits(r, scaled, rr, m.bits);
        tr += std::to_string(rr) + "," + format_double(t.agreement) + "\n";
        agreement[std::to_string(rr)] = t.agreement;
    }
    run.text("trunc_agreement.csv", "fraction of bits", tr);

    json s;
    std::vector<double> fractions;
    for (Eigen::Index k = 0; k < std::min<Eigen::Index>(8, r.variance_fractions.size()); ++k)
        fractions.push_back(r.variance_fractions(k));
    s["fractions"] = fractions;
    s["pc_key_correlation"] = corr;
    s["truncated_agreement"] = agreement;
    s["components"] = r.components();
    run.summary(s, "fractions of variance; correlations dimensionless");
    run.finish();
}

// ----------------------------------------------------------------- synth

struct SynthArgs {
    std::string preset = "null";
    std::optional<std::size_t> devices;
    std::optional<std::size_t> samples;
};

void cmd_synth(const Globals &g, const SynthArgs &a) {
    const std::uint64_t seed = require_seed(g, "synth");
    auto cfg = syngen::preset(a.preset, seed);
    if (a.devices)
        cfg.devices = *a.devices;
    if (a.samples)
        cfg.samples = *a.samples;
    json params{{"preset", a.preset},
                {"seed", seed},
                {"devices", cfg.devices},
                {"ros", cfg.ros},
                {"samples", cfg.samples},
                {"geometry", cfg.geometry.describe()}};
    Run run(g, "synth", params, json::object());
    const auto data = syngen::generate(cfg);
    syngen::write_dataset(run.dir(), data, cfg);
    json s;
    s["dataset"] = "dataset";
    s["meta"] = "meta.csv";
    s["truth"] = "truth.json";
    s["readings_sha256"] = tensor_hash(data.readings);
    run.summary(s, "MHz");
    run.finish();
}

// ---------------------------------------------------------------- report

void cmd_report(const Globals &g) {
    const std::vector<std::string> parts{"normality", "entropy", "similarity", "attack", "pca"};
    std::vector<std::string> missing;
    json sources = json::object();
    for (const auto &p : parts) {
        const fs::path f = fs::path(g.out) / p / "summary.json";
        if (!fs::exists(f)) {
            missing.push_back(f.string());
            continue;
        }
        sources[p] = json::parse(read_file(f));
    }
    if (!missing.empty()) {
        std::string msg = "report: missing artifacts (run these subcommands first):";
        for (const auto &m : missing)
            msg += "\n  " + m;
        fail(ErrorCategory::Unavailable, msg);
    }
    json hashes = json::object();
    for (const auto &p : parts)
        hashes[p] = sources[p]["manifest"];
    Run run(g, "report", json::object(), hashes);
    json r;
    r["normality_table"] = sources["normality"]["table"];
    r["entropy"] = {{"h_binary", sources["entropy"]["h_binary"]},
                    {"h_normal", sources["entropy"]["h_normal"]}};
    r["serial_correlation"] = sources["similarity"]["serial_correlation"];
    r["attack_envelope"] = sources["attack"]["envelope"];
    r["pca"] = {{"fractions", sources["pca"]["fractions"]},
                {"pc_key_correlation", sources["pca"]["pc_key_correlation"]},
                {"truncated_agreement", sources["pca"]["truncated_agreement"]}};
    r["sources"] = hashes;
    r["manifest"] = run.hash();
    run.document("report.json", r.dump(2) + "\n");
    run.summary({{"report", "report.json"}}, "see report.json");
    run.finish();
}

} // namespace

int run(const std::vector<std::string> &args) {
    std::vector<const char *> argv;
    for (const auto &a : args)
        argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char *const *argv) {
    CLI::App app{"pufstat: statistics for ring-oscillator PUF frequency datasets"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    if (const char *env = std::getenv("PUFSTAT_OUT"))
        g.out = env;
    else
        g.out = "pufstat-out";
    g.threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--dataset", g.dataset, "dataset directory or CSV file");
    app.add_option("--layout", g.layout, "layout descriptor, e.g. dir, dir:rows=sample, csv")
        ->capture_default_str();
    app.add_option("--meta", g.meta, "device,serial CSV");
    app.add_option("--geometry", g.geometry, "chip grid ROWSxCOLS[:col|:row]")
        ->capture_default_str();
    app.add_option("--out", g.out, "output root (default $PUFSTAT_OUT)")->capture_default_str();
    app.add_option("--seed", g.seed, "seed for randomized procedures");
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);

    std::function<void()> action;

    app.add_subcommand("ingest", "build F, D, B, R and the packed bit file")
        ->callback([&] { action = [&] { cmd_ingest(g); }; });

    std::string matrix = "all";
    std::size_t min_samples = 8;
    auto *norm = app.add_subcommand("normality", "Anderson-Darling test on matrix rows");
    norm->add_option("--matrix", matrix)
        ->check(CLI::IsMember({"F", "D", "B", "all"}))
        ->capture_default_str();
    norm->add_option("--min-samples", min_samples)->capture_default_str();
    norm->callback([&] { action = [&] { cmd_normality(g, matrix, min_samples); }; });

    std::string group_sizes = "5,10,20";
    std::size_t min_group = similarity::kDefaultMinGroup;
    auto *sim = app.add_subcommand("similarity", "group variance map and serial correlation");
    sim->add_option("--group-size", group_sizes, "comma separated window sizes")
        ->capture_default_str();
    sim->add_option("--min-group", min_group)->capture_default_str();
    sim->callback([&] { action = [&] { cmd_similarity(g, group_sizes, min_group); }; });

    app.add_subcommand("entropy", "bit bias and entropy estimates")->callback([&] {
        action = [&] { cmd_entropy(g); };
    });
    app.add_subcommand("correlate", "row correlation profiles of D and B")->callback([&] {
        action = [&] { cmd_correlate(g); };
    });

    AttackArgs attack_args;
    auto *att = app.add_subcommand("attack", "covariance fitting attack sweep");
    att->add_option("--fixed-counts", attack_args.counts)->capture_default_str();
    att->add_option("--mode", attack_args.mode)
        ->check(CLI::IsMember({"trend", "exact", "both"}))
        ->capture_default_str();
    att->add_option("--devices", attack_args.devices, "number of target devices")
        ->capture_default_str();
    att->add_option("--selection", attack_args.selection)
        ->check(CLI::IsMember({"even", "random"}))
        ->capture_default_str();
    att->add_option("--trend-magnitude", attack_args.trend_magnitude, "MHz")
        ->capture_default_str();
    att->callback([&] { action = [&] { cmd_attack(g, attack_args); }; });

    std::string pcs = "1,2,3";
    std::string ranks = "1,2,3,5,10,20,50,102,0";
    std::size_t bins = 20;
    auto *pc = app.add_subcommand("pca", "principal component analysis of F");
    pc->add_option("--pcs", pcs, "PCs (1-based) to export")->capture_default_str();
    pc->add_option("--ranks", ranks, "truncation ranks, 0 means full rank")
        ->capture_default_str();
    pc->add_option("--bins", bins, "score histogram bins")->capture_default_str();
    pc->callback([&] { action = [&] { cmd_pca(g, pcs, ranks, bins); }; });

    SynthArgs synth_args;
    auto *syn = app.add_subcommand("synth", "generate a synthetic dataset");
    syn->add_option("--preset", synth_args.preset)
        ->check(CLI::IsMember({"null", "reference", "ygrad"}))
        ->capture_default_str();
    syn->add_option("--devices", synth_args.devices);
    syn->add_option("--samples", synth_args.samples);
    syn->callback([&] { action = [&] { cmd_synth(g, synth_args); }; });

    app.add_subcommand("report", "aggregate summaries of earlier runs")->callback([&] {
        action = [&] { cmd_report(g); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        action();
        return kExitOk;
    } catch (const UsageError &e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error &e) {
        std::cerr << category_name(e.category()) << " error: " << e.what() << "\n";
        return e.category() == ErrorCategory::Io ? kExitIo : kExitAnalysis;
    } catch (const fs::filesystem_error &e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const json::exception &e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitAnalysis;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAnalysis;
    }
}

} // namespace pufstat::cli
