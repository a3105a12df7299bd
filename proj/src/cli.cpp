#include "lab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "lab/serialize.hpp"

namespace ergolab {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double param_or(const RunConfig& c, const std::string& key, double fallback) {
    auto it = c.parameters.find(key);
    return it == c.parameters.end() ? fallback : it->second;
}

struct ParamSpec {
    const char* name;
    double fallback;
    double min;
    double max;
    const char* why;
};

// experiment -> admissible parameters with their preconditions
const std::map<std::string, std::vector<ParamSpec>>& experiment_params() {
    static const std::map<std::string, std::vector<ParamSpec>> table = {
        {"norm", {{"tol", 1e-8, 1e-14, 1e-2, "norm tolerance"}}},
        {"average",
         {{"N", 1000, 1, 1e9, "number of terms"},
          {"x", 0.0, 0.0, 1.0, "start point in [0,1)"},
          {"rows", 20, 1, 1e6, "report rows"}}},
        {"levelset",
         {{"lambda", 1.0, 1e-300, 1e300, "levelset precondition lambda > 0"},
          {"N", 1, 1, 1e7, "number of terms"},
          {"grid_cells", 100000, 1000, 1e8, "grid cells >= 10^3"},
          {"workers", 1, 1, 256, "worker threads"}}},
        {"decompose",
         {{"lambda", 1.0, 1e-300, 1e300, "levelset precondition lambda > 0"},
          {"N", 1, 1, 1e6, "number of terms"},
          {"grid_cells", 100000, 1000, 1e8, "grid cells >= 10^3"},
          {"workers", 1, 1, 256, "worker threads"}}},
        {"witness",
         {{"lambda", 2.0, 1e-300, 1e300, "levelset precondition lambda > 0"},
          {"delta", 0.1, 1e-12, 1.0, "witness slack"},
          {"epsilon", 1e-3, 1e-12, 1.0, "partition left cutoff"},
          {"eta", 1e-2, 1e-12, 1e6, "Riemann tolerance"},
          {"beta_prox", 1e-3, 1e-12, 1.0, "entry proximity"},
          {"n_start", 1, 1, 9e15, "first admissible time"},
          {"n_max", 100000000, 1, 9e15, "entry search budget"},
          {"I_start", 0.0, 0.0, 1.0, "target arc start"},
          {"I_length", 1.0, 0.0, 1.0, "target arc length (1 = full circle)"},
          {"workers", 1, 1, 256, "worker threads"}}},
        {"criterion",
         {{"K", 30, 1, 1e6, "number of terms"},
          {"c", 0.25, 0.0, 1e9, "generator constant c_k"},
          {"growth_C", 0.0, 0.0, 1e9, "growth constant (0: skip proposition checks)"},
          {"bound", 1.0, 1e-12, 1e12, "ratio bound"}}},
        {"construct",
         {{"s", 0.5, 1e-6, 4.0, "g_s exponent"},
          {"K", 18, 16, 1e4, "last stage (schedule runs one further)"},
          {"tol", 1e-6, 1e-12, 1e-2, "schedule tolerance"},
          {"max_total_elements", 10000000, 10, 9e15, "element budget"},
          {"entry_budget", 100000000, 1, 9e15, "entry search budget"},
          {"sample_count", 100, 1, 1e6, "stage check samples"},
          {"cert_samples", 1500, 16, 1e6, "witness certification samples"},
          {"workers", 1, 1, 256, "worker threads"}}},
        {"example-series",
         {{"s", 0.5, 1e-6, 1e3, "family exponent s > 0"},
          {"p", 1.0, 0.0, 1e3, "membership exponent p >= 0"},
          {"K", 100000, 16, 9e15, "partial sum length"}}},
        {"weak-scan",
         {{"lambda_min", 1.2, 1e-300, 1e300, "grid low end"},
          {"lambda_max", 20.0, 1e-300, 1e300, "grid high end"},
          {"lambda_count", 10, 1, 1e4, "grid size"},
          {"family_size", 3, 1, 12, "prefix family members"},
          {"family_max_N", 1000, 1, 1e7, "largest prefix length"},
          {"grid_cells", 100000, 1000, 1e8, "grid cells >= 10^3"},
          {"workers", 1, 1, 256, "worker threads"}}},
    };
    return table;
}

}  // namespace

std::vector<std::string> known_experiments() {
    std::vector<std::string> out;
    for (const auto& [name, _] : experiment_params()) out.push_back(name);
    return out;
}

MonotoneFunction parse_function(const std::string& d) {
    if (d.rfind("const:", 0) == 0) return MonotoneFunction::constant(std::stod(d.substr(6)));
    if (d.rfind("power:", 0) == 0) {
        const double c = std::stod(d.substr(6));
        if (!(c >= 0.0 && c < 1.0)) throw LabError("power:c needs 0 <= c < 1 for integrability");
        return MonotoneFunction::inverse_power(c);
    }
    if (d == "oneminusx") return MonotoneFunction::one_minus_x();
    if (d.rfind("gs:", 0) == 0) return GsFunction::make(std::stod(d.substr(3))).to_monotone();
    throw LabError("unknown function descriptor: " + d);
}

OrliczFunction parse_phi(const std::string& d) {
    if (d.rfind("power:", 0) == 0) return OrliczFunction::power(std::stod(d.substr(6)));
    if (d.rfind("llog:", 0) == 0) return OrliczFunction::llog_beta(std::stod(d.substr(5)));
    if (d.rfind("composite:", 0) == 0) {
        const auto rest = d.substr(10);
        const auto colon = rest.find(':');
        if (colon == std::string::npos) throw LabError("composite phi: want composite:s:p");
        return OrliczFunction::composite(std::stod(rest.substr(0, colon)),
                                         std::stod(rest.substr(colon + 1)));
    }
    throw LabError("unknown phi descriptor: " + d);
}

std::vector<long long> parse_sequence_times(const std::string& d, long long default_n) {
    std::vector<long long> times;
    if (d.empty() || d.rfind("prefix:", 0) == 0) {
        const long long n = d.empty() ? default_n : std::stoll(d.substr(7));
        if (n < 1) throw LabError("prefix:N needs N >= 1");
        times.resize(static_cast<std::size_t>(n));
        for (long long i = 0; i < n; ++i) times[static_cast<std::size_t>(i)] = i;
        return times;
    }
    if (d.rfind("B:", 0) == 0) {
        const auto seq = PerturbedBlockSequence::parse(d);
        return seq.elements_upto(seq.max_element());
    }
    throw LabError("unknown sequence descriptor: " + d);
}

namespace {

// generator specs for the criterion experiment: "l_k=2^k, d_k=2",
// "d_k=floor(c_k*l_k)", "l_k=k", integer constants
long long eval_generator_term(const std::string& expr, int k, double c_param, long long l_k) {
    if (expr == "2^k") {
        if (k > 62) throw OverflowDetected("2^k overflows past k = 62");
        return 1LL << k;
    }
    if (expr == "k") return k;
    if (expr.rfind("floor(", 0) == 0 && expr.back() == ')') {
        const std::string inner = expr.substr(6, expr.size() - 7);
        const auto star = inner.find("*l_k");
        if (star == std::string::npos) throw LabError("generator: want floor(<c>*l_k)");
        const std::string cs = inner.substr(0, star);
        const double c = cs == "c_k" ? c_param : std::stod(cs);
        return static_cast<long long>(std::floor(c * static_cast<double>(l_k)));
    }
    return std::stoll(expr);
}

std::pair<std::vector<long long>, std::vector<long long>> generate_ld(const std::string& spec,
                                                                      int K, double c_param) {
    // "l_k=<expr>, d_k=<expr>"
    const auto comma = spec.find(',');
    if (comma == std::string::npos || spec.rfind("l_k=", 0) != 0)
        throw LabError("generator: want \"l_k=<expr>, d_k=<expr>\"");
    std::string lexpr = spec.substr(4, comma - 4);
    std::string dexpr = spec.substr(comma + 1);
    const auto deq = dexpr.find("d_k=");
    if (deq == std::string::npos) throw LabError("generator: missing d_k=");
    dexpr = dexpr.substr(deq + 4);
    auto strip = [](std::string s) {
        s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
        return s;
    };
    lexpr = strip(lexpr);
    dexpr = strip(dexpr);
    std::vector<long long> l, d;
    for (int k = 1; k <= K; ++k) {
        const long long lk = eval_generator_term(lexpr, k, c_param, 0);
        if (lk < 1) throw LabError("generator produced l_k < 1");
        l.push_back(lk);
        d.push_back(eval_generator_term(dexpr, k, c_param, lk));
    }
    return {l, d};
}

struct Csv {
    std::ofstream out;
    explicit Csv(const std::filesystem::path& path) : out(path, std::ios::binary) {
        if (!out) throw LabError("cannot open " + path.string());
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    }
};

json run_norm(const RunConfig& c, Csv& csv) {
    const auto phi = parse_phi(c.phi);
    const auto f = parse_function(c.function);
    const double norm = luxemburg_norm(phi, f, param_or(c, "tol", 1e-8));
    csv.row({"phi", "function", "norm"});
    csv.row({phi.name(), c.function, fmt(norm)});
    return json{{"norm", norm}};
}

json run_average(const RunConfig& c, Csv& csv) {
    const auto sys = RotationSystem::parse(c.system);
    const auto f = parse_function(c.function);
    const long long N = static_cast<long long>(param_or(c, "N", 1000));
    const auto times = parse_sequence_times(c.sequence, N);
    const CirclePoint x = CirclePoint::from_double(param_or(c, "x", 0.0));
    const long long rows = std::min<long long>(static_cast<long long>(param_or(c, "rows", 20)),
                                               static_cast<long long>(times.size()));
    csv.row({"terms", "n_last", "average"});
    for (long long i = 1; i <= rows; ++i) {
        const std::size_t count = static_cast<std::size_t>(
            static_cast<double>(times.size()) * static_cast<double>(i) /
            static_cast<double>(rows));
        if (count == 0) continue;
        const std::span<const long long> prefix(times.data(), count);
        csv.row({std::to_string(count), std::to_string(prefix.back()),
                 fmt(ergodic_average(sys, f, prefix, x))});
    }
    const double avg = ergodic_average(sys, f, times, x);
    return json{{"average", avg}, {"terms", times.size()}};
}

json run_levelset(const RunConfig& c, Csv& csv) {
    const auto sys = RotationSystem::parse(c.system);
    const auto f = parse_function(c.function);
    const auto times =
        parse_sequence_times(c.sequence, static_cast<long long>(param_or(c, "N", 1)));
    const double lambda = param_or(c, "lambda", 1.0);
    const long long cells = static_cast<long long>(param_or(c, "grid_cells", 100000));
    const auto ls = compute_level_set(sys, f, times, lambda, cells,
                                      static_cast<int>(param_or(c, "workers", 1)));
    csv.row({"arc_index", "start", "length"});
    for (std::size_t i = 0; i < ls.arcs.size(); ++i) {
        const auto j = to_json(ls.arcs[i]);
        csv.row({std::to_string(i), j["start_decimal_string"].get<std::string>(),
                 j["length_decimal_string"].get<std::string>()});
    }
    return to_json(ls);
}

json run_decompose(const RunConfig& c, Csv& csv) {
    const auto sys = RotationSystem::parse(c.system);
    const auto f = parse_function(c.function);
    const auto times =
        parse_sequence_times(c.sequence, static_cast<long long>(param_or(c, "N", 1)));
    const double lambda = param_or(c, "lambda", 1.0);
    const long long cells = static_cast<long long>(param_or(c, "grid_cells", 100000));
    const auto d = decompose_level_set(sys, f, times, lambda, cells,
                                       static_cast<int>(param_or(c, "workers", 1)));
    csv.row({"k", "n_k", "a_k"});
    for (std::size_t k = 0; k < times.size(); ++k)
        csv.row({std::to_string(k), std::to_string(times[k]), fmt(d.a_values[k])});
    return to_json(d);
}

json run_witness(const RunConfig& c, Csv& csv) {
    const auto sys = RotationSystem::parse(c.system);
    const auto f = parse_function(c.function);
    const double lambda = param_or(c, "lambda", 2.0);
    CircleArc I = param_or(c, "I_length", 1.0) >= 1.0
                      ? CircleArc::full_circle()
                      : CircleArc::from_doubles(param_or(c, "I_start", 0.0),
                                                param_or(c, "I_length", 1.0));
    WitnessOptions opts;
    opts.n_max = static_cast<long long>(param_or(c, "n_max", 1e8));
    opts.workers = static_cast<int>(param_or(c, "workers", 1));
    const auto w = construct_witness(
        sys, f, lambda, I, param_or(c, "delta", 0.1), param_or(c, "epsilon", 1e-3),
        param_or(c, "eta", 1e-2), param_or(c, "beta_prox", 1e-3),
        static_cast<long long>(param_or(c, "n_start", 1)), opts);
    csv.row({"j", "n_j"});
    for (std::size_t j = 0; j < w.subsequence.size(); ++j)
        csv.row({std::to_string(j), std::to_string(w.subsequence[j])});
    return to_json(w);
}

json run_criterion(const RunConfig& c, Csv& csv) {
    const auto phi = parse_phi(c.phi);
    const int K = static_cast<int>(param_or(c, "K", 30));
    std::vector<long long> l, d;
    if (c.sequence.rfind("B:", 0) == 0) {
        const auto seq = PerturbedBlockSequence::parse(c.sequence);
        for (const auto& b : seq.blocks()) l.push_back(b.length);
        for (const auto& ds : seq.perturbations()) d.push_back(static_cast<long long>(ds.size()));
        d.resize(l.size(), 0);
    } else {
        std::tie(l, d) = generate_ld(c.sequence, K, param_or(c, "c", 0.25));
    }
    const int KK = std::min<int>(K, static_cast<int>(l.size()));
    const auto report = perturbation_criterion(phi, l, d, KK);
    const auto reinhold = reinhold_ratio(l, d, KK, param_or(c, "bound", 1.0));
    csv.row({"k", "term", "partial_sum", "reinhold_ratio"});
    for (int k = 0; k < KK; ++k)
        csv.row({std::to_string(k + 1), fmt(report.terms[static_cast<std::size_t>(k)]),
                 fmt(report.partial_sums[static_cast<std::size_t>(k)]),
                 fmt(reinhold.ratios[static_cast<std::size_t>(k)])});
    json out{{"criterion", to_json(report)},
             {"reinhold",
              {{"bounded", reinhold.bounded}, {"limit_zero", reinhold.limit_zero}}}};
    const double C = param_or(c, "growth_C", 0.0);
    if (C > 0.0) {
        const auto prop = proposition_conditions(phi, l, d, C, KK);
        out["proposition"] = json{{"growth_condition", prop.growth_condition},
                                  {"sum_length_ratios", to_json(prop.sum_length_ratios)},
                                  {"sum_inverse_c", to_json(prop.sum_inverse_c)}};
    }
    return out;
}

json run_construct(const RunConfig& c, Csv& csv, const std::filesystem::path& dir) {
    const auto sys = RotationSystem::parse(c.system);
    const double s = param_or(c, "s", 0.5);
    const auto f = parse_function(c.function);
    const int K = static_cast<int>(param_or(c, "K", 18));
    const auto schedule = schedule_from_example(s, K + 1, f, param_or(c, "tol", 1e-6));
    ConstructOptions opts;
    opts.max_total_elements = static_cast<long long>(param_or(c, "max_total_elements", 1e7));
    opts.entry_budget = static_cast<long long>(param_or(c, "entry_budget", 1e8));
    opts.sample_count = static_cast<int>(param_or(c, "sample_count", 100));
    opts.cert_samples = static_cast<long long>(param_or(c, "cert_samples", 1500));
    opts.workers = static_cast<int>(param_or(c, "workers", 1));
    const auto result = construct_divergent_sequence(sys, f, schedule, K, opts);
    csv.row({"k", "l_k", "d_k", "lhs_min", "rhs", "passed"});
    json stages = json::array();
    for (const auto& r : result.stages) {
        csv.row({std::to_string(r.k), std::to_string(r.l_k), std::to_string(r.d_k),
                 fmt(r.lower_bound_lhs), fmt(r.lower_bound_rhs), r.passed ? "1" : "0"});
        stages.push_back(to_json(r));
    }
    std::ofstream seq_out(dir / "construct_sequence.txt", std::ios::binary);
    seq_out << result.sequence.to_text() << '\n';
    return json{{"stages", stages},
                {"sequence_file", "construct_sequence.txt"},
                {"total_elements", result.sequence.total_elements()}};
}

json run_example_series(const RunConfig& c, Csv& csv) {
    const double s = param_or(c, "s", 0.5);
    const double p = param_or(c, "p", 1.0);
    const auto report =
        example_criterion_series(s, p, static_cast<long long>(param_or(c, "K", 100000)));
    csv.row({"k", "term", "partial_sum"});
    const std::size_t n = report.terms.size();
    const std::size_t step = std::max<std::size_t>(1, n / 50);
    for (std::size_t i = 0; i < n; i += step)
        csv.row({std::to_string(16 + i), fmt(report.terms[i]), fmt(report.partial_sums[i])});
    json out{{"classification", to_string(report.classification)},
             {"rationale", report.rationale},
             {"final_partial_sum", report.partial_sums.back()}};
    out["membership"] =
        membership_exponent_classifier(s, p) == Membership::InSpace ? "InSpace" : "NotInSpace";
    return out;
}

json run_weak_scan(const RunConfig& c, Csv& csv) {
    const auto sys = RotationSystem::parse(c.system);
    const auto f = parse_function(c.function);
    const auto phi = parse_phi(c.phi);
    const int m = static_cast<int>(param_or(c, "family_size", 3));
    const long long maxN = static_cast<long long>(param_or(c, "family_max_N", 1000));
    std::vector<std::vector<long long>> family;
    for (int j = 1; j <= m; ++j) {
        const auto n = static_cast<long long>(std::llround(
            std::pow(static_cast<double>(maxN), static_cast<double>(j) / m)));
        family.push_back(parse_sequence_times("", std::max<long long>(1, n)));
    }
    const int count = static_cast<int>(param_or(c, "lambda_count", 10));
    const double lo = param_or(c, "lambda_min", 1.2), hi = param_or(c, "lambda_max", 20.0);
    std::vector<double> grid;
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        grid.push_back(lo * std::pow(hi / lo, t));
    }
    const auto scan = weak_phi_inequality_scan(
        sys, f, phi, family, grid, static_cast<long long>(param_or(c, "grid_cells", 100000)),
        static_cast<int>(param_or(c, "workers", 1)));
    csv.row({"lambda", "measure", "integral", "integral_resolved", "empirical_c"});
    for (const auto& row : scan.rows)
        csv.row({fmt(row.lambda), fmt(row.measure), fmt(row.integral),
                 row.integral_resolved ? "1" : "0", fmt(row.empirical_c)});
    return to_json(scan);
}

}  // namespace

std::variant<RunConfig, std::vector<ValidationIssue>> validate_config(const std::string& text) {
    std::vector<ValidationIssue> issues;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        issues.push_back({"<parse>", "line " + std::to_string(line) + ": " + e.what()});
        return issues;
    }
    if (!j.is_object()) {
        issues.push_back({"<root>", "config must be a JSON object"});
        return issues;
    }

    static const std::set<std::string> known_keys = {"experiment", "system",   "function",
                                                     "phi",        "sequence", "parameters",
                                                     "output_dir"};
    for (const auto& [key, _] : j.items()) {
        if (!known_keys.count(key)) issues.push_back({key, "unknown key"});
    }

    RunConfig config;
    if (!j.contains("experiment")) {
        issues.push_back({"experiment", "required"});
    } else if (!j["experiment"].is_string()) {
        issues.push_back({"experiment", "must be a string"});
    } else {
        config.experiment = j["experiment"].get<std::string>();
        if (!experiment_params().count(config.experiment))
            issues.push_back({"experiment", "unknown experiment '" + config.experiment + "'"});
    }
    auto take_string = [&](const char* key, std::string& into) {
        if (!j.contains(key)) return;
        if (!j[key].is_string()) {
            issues.push_back({key, "must be a string"});
            return;
        }
        into = j[key].get<std::string>();
    };
    take_string("system", config.system);
    take_string("function", config.function);
    take_string("phi", config.phi);
    take_string("sequence", config.sequence);
    take_string("output_dir", config.output_dir);

    if (j.contains("parameters")) {
        if (!j["parameters"].is_object()) {
            issues.push_back({"parameters", "must be an object of named scalars"});
        } else {
            for (const auto& [key, value] : j["parameters"].items()) {
                if (!value.is_number()) {
                    issues.push_back({"parameters." + key, "must be a number"});
                    continue;
                }
                config.parameters[key] = value.get<double>();
            }
        }
    }

    if (experiment_params().count(config.experiment)) {
        const auto& specs = experiment_params().at(config.experiment);
        for (const auto& [key, value] : config.parameters) {
            const auto it = std::find_if(specs.begin(), specs.end(),
                                         [&](const ParamSpec& s) { return key == s.name; });
            if (it == specs.end()) {
                issues.push_back({"parameters." + key,
                                  "unknown parameter for experiment " + config.experiment});
            } else if (!(value >= it->min && value <= it->max)) {
                issues.push_back({"parameters." + key,
                                  std::string(it->why) + ": need " + fmt(it->min) + " <= " +
                                      key + " <= " + fmt(it->max)});
            }
        }
        // fill defaults
        for (const auto& spec : specs)
            if (!config.parameters.count(spec.name)) config.parameters[spec.name] = spec.fallback;
    }

    // descriptor checks, without executing anything
    if (issues.empty()) {
        if (config.function.empty()) {
            // the construction runs on the singular family tied to parameter s
            config.function = config.experiment == "construct"
                                  ? "gs:" + fmt(config.parameters.at("s"))
                                  : "const:1";
        }
        try {
            RotationSystem::parse(config.system);
        } catch (const LabError& e) {
            issues.push_back({"system", e.what()});
        }
        try {
            parse_function(config.function);
        } catch (const std::exception& e) {
            issues.push_back({"function", e.what()});
        }
        if (config.experiment == "construct" && config.function.rfind("gs:", 0) != 0)
            issues.push_back({"function", "construct runs on the gs family (gs:<s>)"});
        const bool needs_phi = config.experiment == "norm" || config.experiment == "criterion" ||
                               config.experiment == "weak-scan";
        if (needs_phi) {
            if (config.phi.empty()) {
                issues.push_back({"phi", "required for experiment " + config.experiment});
            } else {
                try {
                    parse_phi(config.phi);
                } catch (const std::exception& e) {
                    issues.push_back({"phi", e.what()});
                }
            }
        }
        if (config.experiment == "criterion" && config.sequence.empty())
            issues.push_back({"sequence", "required: block literal or generator spec"});
    }

    if (!issues.empty()) return issues;
    return config;
}

int run_experiment(const RunConfig& config) {
    std::filesystem::path dir = config.output_dir;
    if (const char* env = std::getenv("LAB_OUTPUT_DIR")) dir = env;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    json summary;
    summary["config"] = {{"experiment", config.experiment}, {"system", config.system},
                         {"function", config.function},     {"phi", config.phi},
                         {"sequence", config.sequence},     {"parameters", config.parameters},
                         {"output_dir", dir.string()}};
    summary["library_version"] = kVersion;
    summary["seed"] = param_or(config, "seed", 0.0);

    const auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    try {
        Csv csv(dir / (config.experiment + ".csv"));
        json result;
        if (config.experiment == "norm") result = run_norm(config, csv);
        else if (config.experiment == "average") result = run_average(config, csv);
        else if (config.experiment == "levelset") result = run_levelset(config, csv);
        else if (config.experiment == "decompose") result = run_decompose(config, csv);
        else if (config.experiment == "witness") result = run_witness(config, csv);
        else if (config.experiment == "criterion") result = run_criterion(config, csv);
        else if (config.experiment == "construct") result = run_construct(config, csv, dir);
        else if (config.experiment == "example-series") result = run_example_series(config, csv);
        else if (config.experiment == "weak-scan") result = run_weak_scan(config, csv);
        else throw LabError("unknown experiment " + config.experiment);
        summary["result"] = result;
        summary["status"] = "ok";
    } catch (const LabError& e) {
        summary["status"] = "error";
        summary["error"] = e.what();
        code = 3;
    } catch (const std::exception& e) {
        summary["status"] = "error";
        summary["error"] = e.what();
        code = 3;
    }
    summary["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ofstream out(dir / "summary.json", std::ios::binary);
    out << summary.dump(2) << '\n';
    return code;
}

}  // namespace ergolab
