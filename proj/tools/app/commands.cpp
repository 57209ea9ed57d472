#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <ostream>
#include <sstream>

#include "criteria.hpp"
#include "manifest.hpp"
#include "pslab/error.hpp"
#include "pslab/heuristics.hpp"
#include "pslab/moment_lab.hpp"
#include "pslab/sieve_theory.hpp"
#include "sampling.hpp"

namespace pslab::app {

namespace {

constexpr std::size_t kSampledCorpusSize = 50;
constexpr double kReferenceRho = 0.0282;
constexpr double kReferenceKappa = 0.02761;

CachedSweep cached_sweep(const RunConfig& config, std::ostream& err) {
    SweepConfig sc;
    sc.x = config.x;
    sc.worker_count = config.threads;
    sc.cache_dir = config.cache_dir;
    auto result = load_or_sweep(sc);
    if (result.status == CacheStatus::rebuilt)
        err << "notice: cache file " << result.path.string() << " was unreadable or from another version; rebuilt\n";
    return result;
}

std::string cache_note(const CachedSweep& s) {
    switch (s.status) {
    case CacheStatus::disabled: return "map cache disabled";
    case CacheStatus::hit: return "map cache hit: " + s.path.string();
    case CacheStatus::miss: return "map cache written: " + s.path.string();
    case CacheStatus::rebuilt: return "map cache rebuilt: " + s.path.string();
    }
    return {};
}

std::string massfn_csv(const RepMultiplicityMap& map, const HeuristicConstants& constants) {
    std::ostringstream s;
    write_massfn_csv(map.x(), mass_function_rows(mass_function(map), constants), s);
    return s.str();
}

std::vector<RepTuple> load_corpus(const RunConfig& config, ReportBundle& bundle, bool sample_if_missing) {
    if (config.corpus) {
        std::ifstream in(*config.corpus);
        if (!in) throw UsageError("cannot read corpus " + config.corpus->string());
        return read_corpus(in);
    }
    if (!sample_if_missing) return {};
    auto tuples = sample_coprime_tuples(kSampledCorpusSize, config.seed, std::min<u64>(config.x, 100'000));
    std::ostringstream s;
    write_corpus(tuples, s);
    bundle.write_file("corpus.txt", s.str());
    bundle.add_note("corpus sampled with seed " + std::to_string(config.seed));
    return tuples;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
    ReportBundle bundle(config);
    const auto sweep = cached_sweep(config, err);
    bundle.add_note(cache_note(sweep));
    const auto& map = sweep.map;

    std::ostringstream moments;
    std::vector<MomentReport> reports;
    if (!map.empty()) reports.push_back(build_moment_report(map, config.k_max, true));
    write_moments_csv(reports, moments);
    bundle.write_file("moments.csv", moments.str());

    const auto constants = euler_c_lambda(config.cutoff, config.threads);
    bundle.write_file("massfn.csv", massfn_csv(map, constants));

    std::ostringstream omega;
    write_omega_csv(config.x, config.x >= 2 ? count_M_by_omega(config.x) : std::map<unsigned, u64>{}, omega);
    bundle.write_file("omega.csv", omega.str());

    const auto manifest = bundle.finish();
    out << "sweep x=" << config.x << ": " << map.size() << " keys, " << map.total_pairs() << " ordered pairs\n"
        << "wrote " << manifest.string() << '\n';
    return kExitOk;
}

int cmd_massfn(const RunConfig& config, std::ostream& out, std::ostream& err) {
    ReportBundle bundle(config);
    const auto sweep = cached_sweep(config, err);
    bundle.add_note(cache_note(sweep));
    const auto constants = euler_c_lambda(config.cutoff, config.threads);
    bundle.write_file("massfn.csv", massfn_csv(sweep.map, constants));
    const auto manifest = bundle.finish();
    out << "massfn x=" << config.x << "\nwrote " << manifest.string() << '\n';
    return kExitOk;
}

int cmd_singular(const RunConfig& config, std::ostream& out, std::ostream&) {
    ReportBundle bundle(config);
    const auto tuples = load_corpus(config, bundle, true);
    const auto rows = singular_report(tuples, config.cutoff);
    std::ostringstream s;
    write_singular_csv(rows, s);
    bundle.write_file("singular.csv", s.str());

    std::optional<double> min_admissible;
    for (const auto& r : rows)
        if (r.series && r.admissible) min_admissible = std::min(min_admissible.value_or(r.series->value), r.series->value);
    if (min_admissible) bundle.add_note("smallest singular series over admissible tuples: " + format_double(*min_admissible));

    const auto manifest = bundle.finish();
    out << "singular: " << rows.size() << " tuples, cutoff " << config.cutoff << "\nwrote " << manifest.string() << '\n';
    return kExitOk;
}

int cmd_constants(const RunConfig& config, std::ostream& out, std::ostream&) {
    using nlohmann::ordered_json;
    ReportBundle bundle(config);
    const auto hc = euler_c_lambda(config.cutoff, config.threads);

    ordered_json j;
    j["lambda"] = hc.lambda;
    j["delta"] = hc.delta;
    j["tau"] = hc.tau;
    j["c_lambda"] = hc.c_lambda;
    j["rho"] = hc.rho;
    j["kappa_tilde"] = hc.kappa_tilde;
    j["prime_cutoff"] = hc.prime_cutoff;
    j["largest_prime"] = hc.largest_prime;
    j["acceleration"] = hc.acceleration;
    j["unaccelerated"] = {{"c_lambda", hc.c_lambda_raw},
                          {"rho", 8 * hc.c_lambda_raw},
                          {"kappa_tilde", hc.c_lambda_raw * std::sqrt(std::pow(2 * hc.lambda, 3) / std::numbers::pi)}};
    j["sensitivity"] = {{"compared_cutoff", hc.prime_cutoff / 2},
                        {"relative_change", hc.sensitivity},
                        {"relative_change_unaccelerated", hc.sensitivity_raw}};
    const double rho_dev = hc.rho / kReferenceRho - 1, kappa_dev = hc.kappa_tilde / kReferenceKappa - 1;
    j["reference"] = {{"rho", kReferenceRho},
                      {"kappa_tilde", kReferenceKappa},
                      {"rho_relative_deviation", rho_dev},
                      {"kappa_tilde_relative_deviation", kappa_dev},
                      {"flagged", std::abs(rho_dev) >= 0.02 || std::abs(kappa_dev) >= 0.02}};
    bundle.write_file("constants.json", j.dump(2) + "\n");

    std::ostringstream ex;
    ex << "k,exponent\n";
    for (unsigned k = 1; k <= 14; ++k) ex << k << ',' << moment_k_exponent(k) << '\n';
    bundle.write_file("exponents.csv", ex.str());

    const auto manifest = bundle.finish();
    out << "rho = " << format_double(hc.rho) << ", kappa_tilde = " << format_double(hc.kappa_tilde) << " over "
        << hc.prime_cutoff << " primes\nwrote " << manifest.string() << '\n';
    return kExitOk;
}

int cmd_fk(const RunConfig& config, std::ostream& out, std::ostream&) {
    ReportBundle bundle(config);
    auto tuples = load_corpus(config, bundle, false);
    if (!config.corpus) {
        tuples.emplace_back(1, std::vector<Slot>{{1, 0}});
        tuples.emplace_back(130, std::vector<Slot>{{3, 11}, {7, 9}});
    }
    const u64 z = config.x;
    std::ostringstream s;
    s << "tuple_id,N,k,z,f_k,f_k_star,S,ratio_z,ratio_2z,status\n";
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        const auto& t = tuples[i];
        s << i + 1 << ',' << t.norm() << ',' << t.k() << ',' << z << ',';
        if (!t.coprime()) {
            s << ",,,,,non-coprime\n";
            continue;
        }
        const FkOptions fo{config.threads};
        const u64 f = count_fk(z, t, false, fo), fs = count_fk(z, t, true, fo);
        s << f << ',' << fs << ',';
        std::string status = "ok";
        std::optional<double> S, rz, r2z;
        try {
            const auto series = singular_series(t, std::max<u64>(config.cutoff, 2 * t.k() + 2));
            if (series.value == 0) {
                status = "non-admissible";
                S = 0.0;
            } else if (z >= 3) {
                S = series.value;
                const double e = 2.0 * static_cast<double>(t.k()) + 1.0;
                auto ratio = [&](u64 zz, u64 count) {
                    const double zd = static_cast<double>(zz);
                    return static_cast<double>(count) * std::pow(std::log(zd), e) / (series.value * zd);
                };
                rz = ratio(z, f);
                r2z = ratio(2 * z, count_fk(2 * z, t, false, fo));
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::precondition_violation) throw;
            status = "degenerate";
        }
        s << opt(S) << ',' << opt(rz) << ',' << opt(r2z) << ',' << status << '\n';
    }
    bundle.write_file("fk.csv", s.str());
    const auto manifest = bundle.finish();
    out << "fk: " << tuples.size() << " tuples at z = " << z << "\nwrote " << manifest.string() << '\n';
    return kExitOk;
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream&) {
    ReportBundle bundle(config);
    CriteriaOptions opts;
    opts.threads = config.threads;
    opts.seed = config.seed;
    opts.quick = config.quick;
    opts.cache_dir = config.cache_dir;
    opts.on_result = [&](const CriterionResult& r) { out << format_result_line(r) << '\n' << std::flush; };
    const auto results = run_criteria(opts);

    std::ostringstream csv;
    csv << "criterion,status,seconds,budget_seconds,detail\n";
    unsigned pass = 0, fail = 0, warn = 0, skip = 0;
    for (const auto& r : results) {
        std::string status = r.skipped ? "skip" : (r.passed ? "pass" : (r.soft ? "warn" : "fail"));
        pass += status == "pass";
        fail += status == "fail";
        warn += status == "warn";
        skip += status == "skip";
        std::string detail = r.detail;
        for (auto& c : detail)
            if (c == '"') c = '\'';
        csv << r.id << ',' << status << ',' << format_double(r.seconds) << ',' << format_double(r.budget_seconds) << ",\""
            << detail << "\"\n";
    }
    bundle.write_file("verify.csv", csv.str());
    bundle.finish();

    out << "\nsummary: " << pass << " passed, " << fail << " failed, " << warn << " soft warnings, " << skip
        << " skipped\n";
    return all_hard_passed(results) ? kExitOk : kExitCriterion;
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.command == "sweep") return cmd_sweep(config, out, err);
        if (config.command == "massfn") return cmd_massfn(config, out, err);
        if (config.command == "singular") return cmd_singular(config, out, err);
        if (config.command == "constants") return cmd_constants(config, out, err);
        if (config.command == "fk") return cmd_fk(config, out, err);
        if (config.command == "verify") return cmd_verify(config, out, err);
        err << "error: unknown command '" << config.command << "'\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return e.kind() == ErrorKind::resource_limit ? kExitResource : kExitUsage;
    }
}

}  // namespace pslab::app
