#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qkdsec/asymptotics.hpp"
#include "qkdsec/error.hpp"
#include "qkdsec/gf2.hpp"
#include "qkdsec/numerics.hpp"
#include "qkdsec/oracles.hpp"
#include "qkdsec/protocol.hpp"
#include "qkdsec/rng.hpp"
#include "qkdsec/secbounds.hpp"

namespace qkdsec::cli {

namespace {

using ojson = nlohmann::ordered_json;

std::string fmt_sig(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::uint64_t env_seed() {
    const char* raw = std::getenv("QKDSEC_SEED");
    if (raw == nullptr || *raw == '\0') return 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0')
        throw precondition_error("QKDSEC_SEED must be a decimal unsigned integer");
    return static_cast<std::uint64_t>(v);
}

struct OutputOpts {
    std::string format = "text";
    int digits = 6;
};

void add_output_opts(CLI::App* cmd, OutputOpts& o) {
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"json", "csv", "text"}))
        ->capture_default_str();
    cmd->add_option("--digits", o.digits, "Significant digits in text/csv output")
        ->check(CLI::Range(1, 17))
        ->capture_default_str();
}

// The three accepted slack specifications: a constant, a per-count table
// file ("k delta" per line), or the per-count closed form hitting a target
// tail mass.
struct DeltaOpts {
    std::optional<double> constant;
    std::string table_path;
    std::optional<double> from_eps;

    void add_to(CLI::App* cmd) {
        auto* a = cmd->add_option("--delta", constant, "Constant slack added to k/l");
        auto* b = cmd->add_option("--delta-table", table_path,
                                  "File with one 'k delta' pair per line")
                      ->check(CLI::ExistingFile);
        auto* c = cmd->add_option("--delta-from-eps", from_eps,
                                  "Solve the slack per count for this target tail mass");
        a->excludes(b)->excludes(c);
        b->excludes(c);
    }

    bool any() const { return constant || !table_path.empty() || from_eps; }

    std::string describe() const {
        if (constant) return "constant:" + fmt_sig(*constant, 17);
        if (!table_path.empty()) return "table:" + table_path;
        if (from_eps) return "from-eps:" + fmt_sig(*from_eps, 17);
        return "constant:0";
    }

    std::function<double(std::int64_t)> make(std::int64_t n, std::int64_t l) const {
        if (constant) {
            const double c = *constant;
            return [c](std::int64_t) { return c; };
        }
        if (!table_path.empty()) {
            auto table = std::make_shared<std::map<std::int64_t, double>>();
            std::ifstream in(table_path);
            if (!in) throw precondition_error("cannot open delta table: " + table_path);
            std::string line;
            while (std::getline(in, line)) {
                const auto hash = line.find('#');
                if (hash != std::string::npos) line.erase(hash);
                std::istringstream row(line);
                std::int64_t k = 0;
                double d = 0;
                if (row >> k >> d) (*table)[k] = d;
            }
            if (table->empty()) throw precondition_error("delta table is empty: " + table_path);
            return [table](std::int64_t k) {
                const auto it = table->find(k);
                if (it == table->end())
                    throw precondition_error("delta table has no entry for count " +
                                             std::to_string(k));
                return it->second;
            };
        }
        const double eps = from_eps.value_or(0.0);
        if (from_eps) {
            return [n, l, eps](std::int64_t k) {
                if (k <= 0 || k >= l) return 0.0;  // the closed form vanishes at the edges
                return asym::solve_delta(n, l, k, eps);
            };
        }
        return [](std::int64_t) { return 0.0; };
    }
};

void emit_kv_text(std::ostream& out, const ojson& j, int digits, const std::string& prefix) {
    for (const auto& [key, value] : j.items()) {
        if (value.is_object()) {
            emit_kv_text(out, value, digits, prefix + key + ".");
        } else if (value.is_number_float()) {
            out << prefix << key << " = " << fmt_sig(value.get<double>(), digits) << "\n";
        } else if (value.is_null()) {
            out << prefix << key << " = n/a\n";
        } else {
            out << prefix << key << " = " << value.dump() << "\n";
        }
    }
}

std::string csv_cell(const ojson& v, int digits) {
    if (v.is_null()) return "";
    if (v.is_number_float()) return fmt_sig(v.get<double>(), digits);
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") != std::string::npos) {
            std::string quoted = "\"";
            for (char c : s) {
                if (c == '"') quoted += '"';
                quoted += c;
            }
            quoted += '"';
            return quoted;
        }
        return s;
    }
    return v.dump();
}

// Flat single-record table: header line of keys, one row of values.
void emit_record_csv(std::ostream& out, const ojson& flat, int digits) {
    bool first = true;
    for (const auto& [key, value] : flat.items()) {
        (void)value;
        out << (first ? "" : ",") << key;
        first = false;
    }
    out << "\n";
    first = true;
    for (const auto& [key, value] : flat.items()) {
        (void)key;
        out << (first ? "" : ",") << csv_cell(value, digits);
        first = false;
    }
    out << "\n";
}

void emit_rows_csv(std::ostream& out, const std::vector<std::string>& header,
                   const std::vector<ojson>& rows, int digits) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < header.size(); ++i)
            out << (i ? "," : "") << csv_cell(row.contains(header[i]) ? row[header[i]] : ojson(), digits);
        out << "\n";
    }
}

ojson flatten(const ojson& j, const std::string& prefix = "") {
    ojson flat = ojson::object();
    for (const auto& [key, value] : j.items()) {
        if (value.is_object()) {
            const ojson inner = flatten(value, prefix + key + ".");
            for (const auto& [k2, v2] : inner.items()) flat[k2] = v2;
        } else if (!value.is_array()) {
            flat[prefix + key] = value;
        }
    }
    return flat;
}

void emit_record(std::ostream& out, const OutputOpts& o, const ojson& j) {
    if (o.format == "json") {
        out << j.dump(2) << "\n";
    } else if (o.format == "csv") {
        emit_record_csv(out, flatten(j), o.digits);
    } else {
        emit_kv_text(out, j, o.digits, "");
    }
}

// ---------------------------------------------------------------- bound ----

struct BoundArgs {
    std::int64_t n = 0, l = 0;
    double rate = 0;
    std::int64_t k_low = -1, k_high = -1, k_both = -1;
    DeltaOpts delta;
    OutputOpts out;
};

int cmd_bound(const BoundArgs& a, std::ostream& out) {
    bounds::ProtocolParams params;
    params.n = a.n;
    params.l = a.l;
    params.rate_R = a.rate;
    params.k_low = a.k_both >= 0 ? a.k_both : a.k_low;
    params.k_high = a.k_both >= 0 ? a.k_both : a.k_high;
    params.delta = a.delta.make(a.n, a.l);

    const auto report = bounds::total_information_bound(params);
    const double delta_hi = params.delta_at(params.k_high);

    ojson j;
    j["command"] = "bound";
    j["params"] = {{"n", params.n},
                   {"l", params.l},
                   {"R", params.rate_R},
                   {"k_low", params.k_low},
                   {"k_high", params.k_high},
                   {"delta_spec", a.delta.describe()},
                   {"delta_at_k_high", delta_hi}};
    j["report"] = {{"total_bound", report.total_bound},
                   {"term1", report.term1},
                   {"term2", report.term2},
                   {"max_mass", report.max_mass},
                   {"argmax_j_term1", report.argmax_j_term1},
                   {"argmax_j_term2", report.argmax_j_term2}};
    j["report"]["per_bit_bound"] =
        report.per_bit_bound ? ojson(*report.per_bit_bound) : ojson(nullptr);
    if (params.k_high > 0 && params.k_high < params.l) {
        const double stat = asym::table_statistic(params.n, params.l, params.k_high, delta_hi);
        j["normal_approx"] = {{"statistic", stat}, {"security_level", num::gauss_cdf(stat)}};
    } else {
        j["normal_approx"] = nullptr;
    }
    emit_record(out, a.out, j);
    return kExitOk;
}

// ---------------------------------------------------------------- table ----

struct TableArgs {
    std::int64_t n = 10000;
    double p = 0.075;
    double delta = 0.01;
    std::vector<std::int64_t> ls = {1000, 10000, 20000, 30000, 40000, 50000};
    OutputOpts out{"csv", 6};
};

int cmd_table(const TableArgs& a, std::ostream& out) {
    std::vector<ojson> rows;
    for (const std::int64_t l : a.ls) {
        const std::int64_t k = std::llround(a.p * static_cast<double>(l));
        const double stat = asym::table_statistic(a.n, l, k, a.delta);
        ojson row;
        row["l"] = l;
        row["statistic"] = stat;
        row["phi"] = num::gauss_cdf(stat);
        std::string note;
        if (a.n == 10000 && a.p == 0.075 && a.delta == 0.01 && l == 40000)
            note = "erratum: reference table prints -4.00, inconsistent with its own "
                   "phi column 0.000342; the consistent statistic is -3.40";
        row["note"] = note;
        rows.push_back(std::move(row));
    }

    if (a.out.format == "json") {
        ojson j;
        j["command"] = "table";
        j["params"] = {{"n", a.n}, {"p", a.p}, {"delta", a.delta}};
        j["rows"] = rows;
        out << j.dump(2) << "\n";
    } else if (a.out.format == "csv") {
        emit_rows_csv(out, {"l", "statistic", "phi", "note"}, rows, a.out.digits);
    } else {
        for (const auto& row : rows) {
            out << "l=" << row["l"].get<std::int64_t>()
                << "  statistic=" << fmt_sig(row["statistic"].get<double>(), a.out.digits)
                << "  phi=" << fmt_sig(row["phi"].get<double>(), a.out.digits);
            const auto note = row["note"].get<std::string>();
            if (!note.empty()) out << "  [" << note << "]";
            out << "\n";
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------- solve-delta ----

struct SolveArgs {
    std::int64_t n = 0, l = 0, k = 0;
    double eps = 0;
    OutputOpts out;
};

int cmd_solve_delta(const SolveArgs& a, std::ostream& out) {
    const double delta = asym::solve_delta(a.n, a.l, a.k, a.eps);
    const double stat = asym::table_statistic(a.n, a.l, a.k, delta);
    ojson j;
    j["command"] = "solve-delta";
    j["params"] = {{"n", a.n}, {"l", a.l}, {"k", a.k}, {"target_eps", a.eps}};
    j["delta"] = delta;
    j["roundtrip"] = {{"statistic", stat}, {"security_level", num::gauss_cdf(stat)}};
    emit_record(out, a.out, j);
    return kExitOk;
}

// ------------------------------------------------------------- exponent ----

struct ExponentArgs {
    double r = 0.5;
    std::optional<double> p_single;
    double p_low = 0, p_high = 0;
    double eps = 0;
    std::optional<double> epsilon_for;
    OutputOpts out;
};

int cmd_exponent(const ExponentArgs& a, std::ostream& out, std::ostream& err) {
    double p_low = a.p_low, p_high = a.p_high;
    if (a.p_single) p_low = p_high = *a.p_single;
    asym::AsymptoticConfig cfg;
    cfg.r = a.r;
    cfg.p_low = p_low;
    cfg.p_high = p_high;
    const double eps = a.eps;
    cfg.slack = [eps](double) { return eps; };

    const auto detail = asym::exponent_detail(cfg);
    ojson j;
    j["command"] = "exponent";
    j["params"] = {{"r", a.r}, {"p_low", p_low}, {"p_high", p_high}, {"eps", a.eps}};
    j["exponent"] = detail.exponent;
    j["argmin_p"] = detail.argmin_p;
    j["argmin_eps_prime"] = detail.argmin_eps_prime;
    if (a.epsilon_for) {
        if (p_low != p_high) {
            err << "--epsilon-for needs a single rate (use --p)\n";
            return kExitUsage;
        }
        j["epsilon_for_exponent"] = {{"target_E", *a.epsilon_for},
                                     {"epsilon", asym::epsilon_for_exponent(*a.epsilon_for, a.r, p_low)}};
    }
    emit_record(out, a.out, j);
    return kExitOk;
}

// -------------------------------------------------------------- compare ----

struct CompareArgs {
    std::vector<double> ps = {0.02, 0.05, 0.075, 0.1};
    std::vector<std::int64_t> ns = {1000, 2000, 4000, 8000, 16000, 32000, 64000, 128000, 256000};
    double rate = 1.0;
    double eps = 0.01;
    std::optional<double> eps_p;
    double err_prob = 0.0;
    OutputOpts out;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
    const double eps_p = a.eps_p.value_or(a.eps);
    std::vector<ojson> rows;
    for (const double p : a.ps) {
        asym::AsymptoticConfig cfg;
        cfg.r = 0.5;
        cfg.p_low = p;
        cfg.p_high = p;
        const double eps = a.eps;
        cfg.slack = [eps](double) { return eps; };
        const double exponent = asym::exponent(cfg);
        for (const std::int64_t n : a.ns) {
            bounds::ProtocolParams params;
            params.n = n;
            params.l = n;
            params.rate_R = a.rate;
            params.k_low = params.k_high = std::llround(p * static_cast<double>(n));
            params.delta = [eps](std::int64_t) { return eps; };
            const double ours = asym::large_deviation_bound(params, cfg, exponent);
            const double reference = asym::baseline_bound(n, eps_p, a.err_prob);
            ojson row;
            row["p"] = p;
            row["n"] = n;
            row["exponent"] = exponent;
            row["bound"] = ours;
            row["reference_bound"] = reference;
            row["ratio"] = ours / reference;
            rows.push_back(std::move(row));
        }
    }

    if (a.out.format == "json") {
        ojson j;
        j["command"] = "compare";
        j["params"] = {{"R", a.rate}, {"eps", a.eps}, {"eps_p", eps_p}, {"err_prob", a.err_prob}};
        j["rows"] = rows;
        out << j.dump(2) << "\n";
    } else if (a.out.format == "csv") {
        emit_rows_csv(out, {"p", "n", "exponent", "bound", "reference_bound", "ratio"}, rows,
                      a.out.digits);
    } else {
        for (const auto& row : rows)
            out << "p=" << fmt_sig(row["p"].get<double>(), a.out.digits)
                << "  n=" << row["n"].get<std::int64_t>()
                << "  bound=" << fmt_sig(row["bound"].get<double>(), a.out.digits)
                << "  reference=" << fmt_sig(row["reference_bound"].get<double>(), a.out.digits)
                << "  ratio=" << fmt_sig(row["ratio"].get<double>(), a.out.digits) << "\n";
    }
    return kExitOk;
}

// ------------------------------------------------------------- simulate ----

struct SimulateArgs {
    std::string code_spec;
    std::string decoder = "auto";
    std::int64_t n_plus = -1, l_plus = -1, n_times = -1, l_times = 0;
    std::int64_t repeat = 1;
    double p_bit = 0, p_phase = 0;
    double rate = 1.0;
    std::int64_t k_low = 0, k_high = 0;
    DeltaOpts delta;
    std::optional<std::uint64_t> seed;
    std::int64_t batch = 0;
    bool annotate_bound = false;
    OutputOpts out;
};

gf2::BinaryCode load_code(const std::string& spec) {
    if (spec.rfind("hamming:", 0) == 0) {
        const std::int64_t blocks = std::strtoll(spec.c_str() + 8, nullptr, 10);
        if (blocks < 1) throw precondition_error("--code hamming:<blocks> needs blocks >= 1");
        return gf2::BinaryCode::hamming74_blocks(blocks);
    }
    std::ifstream in(spec);
    if (!in) throw precondition_error("cannot open code file: " + spec);
    gf2::BitMatrix g = gf2::parse_generator_text(in);
    return gf2::BinaryCode::from_generator(g.cols(), std::move(g));
}

ojson transcript_json(const sim::RunTranscript& t, const std::optional<double>& bound) {
    ojson j;
    j["k_plus"] = t.k_plus;
    j["k_times"] = t.k_times;
    j["aborted_plus"] = t.aborted_plus;
    j["aborted_times"] = t.aborted_times;
    j["replaced_low"] = t.replaced_low;
    j["key_len"] = t.key_len;
    j["alice_key"] = t.alice_key.to_string();
    j["bob_key"] = t.bob_key.to_string();
    j["agree"] = t.agree;
    j["abort_reason"] = t.abort_reason;
    if (bound) j["bound"] = *bound;
    return j;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    sim::SimConfig cfg;
    cfg.code_c1 = load_code(a.code_spec);
    cfg.n_plus = a.n_plus >= 0 ? a.n_plus : cfg.code_c1.length_n;
    cfg.n_times = a.n_times >= 0 ? a.n_times : cfg.n_plus;
    cfg.l_times = a.l_times;
    cfg.l_plus = a.l_plus >= 0 ? a.l_plus : cfg.l_times;
    cfg.repeat_a = a.repeat;
    cfg.channel_p_bit = a.p_bit;
    cfg.channel_p_phase = a.p_phase;
    cfg.seed = a.seed ? *a.seed : env_seed();

    if (a.decoder == "hamming" ||
        (a.decoder == "auto" && a.code_spec.rfind("hamming:", 0) == 0)) {
        cfg.decoder = sim::DecoderKind::hamming_blocks;
    } else {
        cfg.decoder = sim::DecoderKind::exhaustive;
    }

    cfg.params.n = cfg.n_plus;
    cfg.params.l = cfg.l_times;
    cfg.params.rate_R = a.rate;
    cfg.params.k_low = a.k_low;
    cfg.params.k_high = a.k_high;
    cfg.params.delta = a.delta.make(cfg.n_plus, cfg.l_times);

    if (a.batch > 0) {
        const auto s = sim::simulate_batch(cfg, a.batch);
        ojson j;
        j["command"] = "simulate";
        j["mode"] = "batch";
        j["runs"] = s.runs;
        j["transcripts"] = s.transcripts;
        j["abort_rate"] = s.abort_rate;
        j["agreement_rate"] = s.agreement_rate;
        j["mean_key_len"] = s.mean_key_len;
        if (a.out.format == "json") {
            j["k_plus_hist"] = s.k_plus_hist;
            j["k_times_hist"] = s.k_times_hist;
            out << j.dump(2) << "\n";
        } else if (a.out.format == "csv") {
            emit_record_csv(out, flatten(j), a.out.digits);
        } else {
            emit_kv_text(out, j, a.out.digits, "");
        }
        return kExitOk;
    }

    const auto transcripts = sim::simulate_modified(cfg);
    std::vector<ojson> rows;
    for (const auto& t : transcripts) {
        std::optional<double> bound;
        if (a.annotate_bound && !t.aborted_plus && t.abort_reason.empty())
            bound = sim::attach_bound(t, cfg.params);
        rows.push_back(transcript_json(t, bound));
    }

    if (a.out.format == "csv") {
        std::vector<std::string> header = {"k_plus",       "k_times",  "aborted_plus",
                                           "aborted_times", "replaced_low", "key_len",
                                           "alice_key",    "bob_key",  "agree",
                                           "abort_reason"};
        if (a.annotate_bound) header.push_back("bound");
        emit_rows_csv(out, header, rows, a.out.digits);
    } else if (a.out.format == "text") {
        for (const auto& r : rows) {
            out << "k_plus=" << r["k_plus"].get<std::int64_t>()
                << " k_times=" << r["k_times"].get<std::int64_t>()
                << " key_len=" << r["key_len"].get<std::int64_t>()
                << " agree=" << (r["agree"].get<bool>() ? "yes" : "no");
            if (r["aborted_plus"].get<bool>()) out << " ABORTED";
            if (!r["abort_reason"].get<std::string>().empty())
                out << " reason=" << r["abort_reason"].get<std::string>();
            out << "\n";
        }
    } else {
        for (const auto& r : rows) out << r.dump() << "\n";  // line-delimited records
    }
    return kExitOk;
}

// ----------------------------------------------------------- oracle-check --

struct OracleArgs {
    std::string check;
    std::int64_t n = 2;
    std::int64_t d = 4;
    std::int64_t t = 0;
    std::int64_t s = 1;
    std::int64_t trials = 1000;
    bool uniform = false;
    bool exhaustive = false;
    std::string channel = "bsc:0.1";
    std::optional<std::uint64_t> seed;
    OutputOpts out;
};

int check_information_cap(const OracleArgs& a, std::ostream& out) {
    Rng rng(a.seed ? *a.seed : env_seed());
    double min_gap_eta = std::numeric_limits<double>::infinity();
    double min_gap_entropy = std::numeric_limits<double>::infinity();
    double max_slack = 0.0;
    std::int64_t violations = 0;
    for (std::int64_t i = 0; i < a.trials; ++i) {
        const auto p = audit::PauliDistribution::random(a.n, rng);
        const double info = audit::eve_information(p);
        const double cap_eta = audit::eve_information_bound(p);
        const auto m = audit::marginals(p);
        const double cap_entropy = num::shannon_entropy(m.p_z);
        min_gap_eta = std::min(min_gap_eta, cap_eta - info);
        min_gap_entropy = std::min(min_gap_entropy, cap_entropy - info);
        max_slack = std::max(max_slack, cap_eta - info);
        if (info > cap_eta + 1e-12 || info > cap_entropy + 1e-12) ++violations;
    }
    ojson j;
    j["command"] = "oracle-check";
    j["check"] = "information";
    j["params"] = {{"n", a.n}, {"trials", a.trials}};
    j["violations"] = violations;
    j["min_gap_eta"] = min_gap_eta;
    j["min_gap_entropy"] = min_gap_entropy;
    j["max_slack"] = max_slack;
    j["passed"] = violations == 0;
    emit_record(out, a.out, j);
    return violations == 0 ? kExitOk : kExitAudit;
}

int check_entropy_split(const OracleArgs& a, std::ostream& out) {
    Rng rng(a.seed ? *a.seed : env_seed());
    if (a.d < 2) throw precondition_error("--d must be >= 2");
    double min_gap = std::numeric_limits<double>::infinity();
    double max_gap = 0.0;
    std::int64_t violations = 0;
    const std::int64_t trials = a.uniform ? 1 : a.trials;
    for (std::int64_t i = 0; i < trials; ++i) {
        std::vector<double> p(static_cast<std::size_t>(a.d));
        if (a.uniform) {
            std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(a.d));
        } else {
            double total = 0;
            for (auto& v : p) {
                v = -std::log1p(-rng.next_unit());
                total += v;
            }
            for (auto& v : p) v /= total;
        }
        const auto split = audit::entropy_split_bound(p);
        const double gap = split.bound - split.entropy;
        min_gap = std::min(min_gap, gap);
        max_gap = std::max(max_gap, gap);
        if (gap < -1e-12) ++violations;
    }
    ojson j;
    j["command"] = "oracle-check";
    j["check"] = "split";
    j["params"] = {{"d", a.d}, {"trials", trials}, {"uniform", a.uniform}};
    j["violations"] = violations;
    j["min_gap"] = min_gap;
    j["max_gap"] = max_gap;
    if (a.uniform) j["saturated"] = std::abs(min_gap) < 1e-12;
    j["passed"] = violations == 0;
    emit_record(out, a.out, j);
    return violations == 0 ? kExitOk : kExitAudit;
}

gf2::AdditiveChannel load_channel(const std::string& spec, std::int64_t n, Rng& rng) {
    if (spec.rfind("bsc:", 0) == 0) {
        const double p = std::strtod(spec.c_str() + 4, nullptr);
        return gf2::AdditiveChannel::bsc(n, p);
    }
    if (spec == "random") {
        std::vector<double> pmf(std::size_t{1} << n);
        double total = 0;
        for (auto& v : pmf) {
            v = -std::log1p(-rng.next_unit());
            total += v;
        }
        for (auto& v : pmf) v /= total;
        return gf2::AdditiveChannel::from_pmf(n, std::move(pmf));
    }
    throw precondition_error("--channel must be bsc:<p> or random");
}

int check_ensemble_error(const OracleArgs& a, std::ostream& out) {
    Rng rng(a.seed ? *a.seed : env_seed());
    const auto c1 = gf2::sample_subcode(a.n, a.t, rng);
    const auto w = load_channel(a.channel, a.n, rng);
    if (a.exhaustive && audit::count_extensions(a.n - a.t, a.s) > 10000)
        throw precondition_error("--exhaustive: ensemble exceeds 10^4 subspaces");
    const auto res = audit::subcode_ensemble_audit(c1, a.s, w, a.trials, rng);
    ojson j;
    j["command"] = "oracle-check";
    j["check"] = "ensemble";
    j["params"] = {{"n", a.n},       {"t", a.t},           {"s", a.s},
                   {"channel", a.channel}, {"trials", a.trials}, {"exhaustive", a.exhaustive}};
    j["exhaustive"] = res.exhaustive;
    j["instances"] = res.instances;
    j["average_error"] = res.average_error;
    j["bound"] = res.bound;
    j["sigma"] = res.sigma;
    j["passed"] = res.passed;
    emit_record(out, a.out, j);
    return res.passed ? kExitOk : kExitAudit;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite-size key-distribution security bounds and simulator"};
    app.require_subcommand(1);

    BoundArgs bound_args;
    auto* bound = app.add_subcommand("bound", "Evaluate the total and per-bit leakage bounds");
    bound->add_option("--n", bound_args.n, "Raw-key length")->required();
    bound->add_option("--l", bound_args.l, "Check-bit count")->required();
    bound->add_option("--R", bound_args.rate, "Code rate")->required();
    auto* klow = bound->add_option("--k-low", bound_args.k_low, "Lower count clamp");
    auto* khigh = bound->add_option("--k-high", bound_args.k_high, "Abort threshold");
    bound->add_option("--k", bound_args.k_both, "Shorthand for --k-low = --k-high = K")
        ->excludes(klow)
        ->excludes(khigh);
    bound_args.delta.add_to(bound);
    add_output_opts(bound, bound_args.out);

    TableArgs table_args;
    auto* table = app.add_subcommand("table", "Reproduce the security-level table");
    table->add_option("--n", table_args.n, "Raw-key length")->capture_default_str();
    table->add_option("--p", table_args.p, "Observed error fraction k/l")->capture_default_str();
    table->add_option("--delta", table_args.delta, "Constant slack")->capture_default_str();
    table->add_option("--l", table_args.ls, "Check-bit counts")->delimiter(',');
    add_output_opts(table, table_args.out);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve-delta", "Slack needed for a target tail mass");
    solve->add_option("--n", solve_args.n, "Raw-key length")->required();
    solve->add_option("--l", solve_args.l, "Check-bit count")->required();
    solve->add_option("--k", solve_args.k, "Observed count")->required();
    solve->add_option("--eps", solve_args.eps, "Target tail mass")->required();
    add_output_opts(solve, solve_args.out);

    ExponentArgs exp_args;
    auto* expo = app.add_subcommand("exponent", "Asymptotic decay exponent of the bound");
    expo->add_option("--r", exp_args.r, "Check fraction n/(n+l)")->capture_default_str();
    auto* psingle = expo->add_option("--p", exp_args.p_single, "Single anticipated error rate");
    expo->add_option("--p-low", exp_args.p_low, "Window lower edge")->excludes(psingle);
    expo->add_option("--p-high", exp_args.p_high, "Window upper edge")->excludes(psingle);
    expo->add_option("--eps", exp_args.eps, "Constant slack")->required();
    expo->add_option("--epsilon-for", exp_args.epsilon_for,
                     "Also solve the slack achieving this target exponent");
    add_output_opts(expo, exp_args.out);

    CompareArgs cmp_args;
    auto* cmp = app.add_subcommand("compare", "Exponent-based bound vs the reference guarantee");
    cmp->add_option("--p", cmp_args.ps, "Error rates")->delimiter(',');
    cmp->add_option("--n-list", cmp_args.ns, "Block lengths")->delimiter(',');
    cmp->add_option("--R", cmp_args.rate, "Code rate")->capture_default_str();
    cmp->add_option("--eps", cmp_args.eps, "Slack")->capture_default_str();
    cmp->add_option("--eps-p", cmp_args.eps_p, "Reference-bound phase slack (defaults to --eps)");
    cmp->add_option("--err-prob", cmp_args.err_prob, "Reference-bound decoding error probability")
        ->capture_default_str();
    add_output_opts(cmp, cmp_args.out);

    SimulateArgs sim_args;
    auto* simc = app.add_subcommand("simulate", "Run the post-processing pipeline");
    simc->add_option("--code", sim_args.code_spec,
                     "Code: hamming:<blocks> or a generator-matrix text file")
        ->required();
    simc->add_option("--decoder", sim_args.decoder, "Decoder: auto, exhaustive, hamming")
        ->check(CLI::IsMember({"auto", "exhaustive", "hamming"}))
        ->capture_default_str();
    simc->add_option("--n-plus", sim_args.n_plus, "Raw-key block length (default: code length)");
    simc->add_option("--l-plus", sim_args.l_plus, "Key-basis check bits (default: --l-times)");
    simc->add_option("--n-times", sim_args.n_times, "Conjugate raw length (default: --n-plus)");
    simc->add_option("--l-times", sim_args.l_times, "Conjugate check bits")->required();
    simc->add_option("--repeat", sim_args.repeat, "Rounds sharing one estimate")
        ->capture_default_str();
    simc->add_option("--p-bit", sim_args.p_bit, "Bit-flip rate")->capture_default_str();
    simc->add_option("--p-phase", sim_args.p_phase, "Phase-flip rate")->capture_default_str();
    simc->add_option("--R", sim_args.rate, "Code rate for bound annotations")
        ->capture_default_str();
    simc->add_option("--k-low", sim_args.k_low, "Lower count clamp")->capture_default_str();
    simc->add_option("--k-high", sim_args.k_high, "Abort threshold")->required();
    sim_args.delta.add_to(simc);
    simc->add_option("--seed", sim_args.seed, "Seed (default: QKDSEC_SEED or 0)");
    simc->add_option("--batch", sim_args.batch, "Aggregate this many runs instead of transcripts");
    simc->add_flag("--bound", sim_args.annotate_bound, "Annotate transcripts with leakage bounds");
    add_output_opts(simc, sim_args.out);

    OracleArgs oracle_args;
    auto* oracle = app.add_subcommand("oracle-check", "Randomized audits of the core inequalities");
    oracle->add_option("--check", oracle_args.check,
                       "Which inequality: information, split, or ensemble")
        ->required()
        ->check(CLI::IsMember({"information", "split", "ensemble"}));
    oracle->add_option("--n", oracle_args.n, "Qubits (information) or code length (ensemble)")
        ->capture_default_str();
    oracle->add_option("--d", oracle_args.d, "Alphabet size (split)")->capture_default_str();
    oracle->add_option("--t", oracle_args.t, "Base code dimension (ensemble)")
        ->capture_default_str();
    oracle->add_option("--s", oracle_args.s, "Extension dimension (ensemble)")
        ->capture_default_str();
    oracle->add_option("--trials", oracle_args.trials, "Trial count")->capture_default_str();
    oracle->add_flag("--uniform", oracle_args.uniform, "split: audit the uniform distribution");
    oracle->add_flag("--exhaustive", oracle_args.exhaustive,
                     "ensemble: require full enumeration");
    oracle->add_option("--channel", oracle_args.channel, "ensemble noise: bsc:<p> or random")
        ->capture_default_str();
    oracle->add_option("--seed", oracle_args.seed, "Seed (default: QKDSEC_SEED or 0)");
    add_output_opts(oracle, oracle_args.out);

    std::vector<const char*> argv;
    argv.push_back("qkdsec");
    for (const auto& s : args) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help and friends
            out << app.help();
            return kExitOk;
        }
        err << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (bound->parsed()) {
            if (bound_args.k_both < 0 && (bound_args.k_low < 0 || bound_args.k_high < 0)) {
                err << "bound: provide --k or both --k-low and --k-high\n";
                return kExitUsage;
            }
            if (!bound_args.delta.any()) {
                err << "bound: provide one of --delta, --delta-table, --delta-from-eps\n";
                return kExitUsage;
            }
            return cmd_bound(bound_args, out);
        }
        if (table->parsed()) return cmd_table(table_args, out);
        if (solve->parsed()) return cmd_solve_delta(solve_args, out);
        if (expo->parsed()) return cmd_exponent(exp_args, out, err);
        if (cmp->parsed()) return cmd_compare(cmp_args, out);
        if (simc->parsed()) return cmd_simulate(sim_args, out);
        if (oracle->parsed()) {
            if (oracle_args.check == "information") return check_information_cap(oracle_args, out);
            if (oracle_args.check == "split") return check_entropy_split(oracle_args, out);
            if (oracle_args.check == "ensemble") return check_ensemble_error(oracle_args, out);
        }
        err << "no command\n";
        return kExitUsage;
    } catch (const domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const precondition_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitPrecondition;
    }
}

}  // namespace qkdsec::cli
