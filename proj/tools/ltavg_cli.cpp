// ltavg: command-line front end. Data goes to --out (or stdout), progress to stderr.
// Exit status: 0 success, 1 domain error, 2 configuration error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "ltavg/ltavg.hpp"

using namespace ltavg;

namespace {

struct Common {
    std::string field = "Q";
    i64 r = 1;
    int f = 1;
    u64 x = 0;
    std::vector<u64> checkpoints;
    unsigned workers = 1;
    std::string out;
    std::string format = "json";
    u64 budget = default_abelian_budget;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void progress(const std::string& msg) { std::cerr << "[ltavg] " << msg << '\n'; }

/// `--out json` / `--out csv` select the format on stdout; anything else is a path.
void resolve_output(Common& c)
{
    if (c.out == "json" || c.out == "csv") {
        c.format = c.out;
        c.out.clear();
    }
    if (c.format != "json" && c.format != "csv") throw ConfigError("--format must be csv or json");
    if (c.workers < 1) throw ConfigError("--workers must be >= 1");
}

template <class Writer>
void emit(const Common& c, Writer&& write)
{
    if (c.out.empty() || c.out == "-") {
        write(std::cout);
        return;
    }
    std::ofstream os(c.out);
    if (!os) throw ConfigError("cannot open output file " + c.out);
    write(os);
}

void emit_json(const Common& c, const nlohmann::json& doc)
{
    emit(c, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

void emit_report(const Common& c, const ExperimentReport& rep)
{
    progress(rep.experiment + " finished in " + std::to_string(rep.runtime_seconds) + " s");
    if (c.format == "csv")
        emit(c, [&](std::ostream& os) { write_csv(os, rep); });
    else
        emit_json(c, report_document(rep, c.workers));
}

ExperimentOptions options(const Common& c)
{
    ExperimentOptions o;
    o.checkpoints = c.checkpoints;
    if (c.x) o.checkpoints.push_back(c.x);
    if (o.checkpoints.empty()) throw ConfigError("give --x or --checkpoints");
    o.workers = c.workers;
    return o;
}

GaloisFieldSpec field_of(const Common& c)
{
    try {
        progress("loading field " + c.field);
        return load_field(c.field, c.budget);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

CurveBox box_of(const std::string& spec)
{
    try {
        return parse_box(spec);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("--box: ") + e.what());
    }
}

PolyP parse_poly_p(const std::string& s, u64 p)
{
    PolyP out;
    for (i64 v : parse_int_vector(s)) out.push_back(mod_floor(v, p));
    return out;
}

void add_common(CLI::App* cmd, Common& c, bool with_r = true)
{
    cmd->add_option("--field", c.field, "preset (" + [] {
        std::string s;
        for (const auto& n : preset_names()) s += (s.empty() ? "" : ", ") + n;
        return s;
    }() + ") or JSON file");
    if (with_r) cmd->add_option("--r", c.r, "trace value r");
    cmd->add_option("--x", c.x, "bound x (appended to --checkpoints)");
    cmd->add_option("--checkpoints", c.checkpoints, "increasing x values")->delimiter(',');
    cmd->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, "output path (or json|csv for stdout)");
    cmd->add_option("--format", c.format, "csv or json");
    cmd->add_option("--budget", c.budget, "prime budget for empirical field data");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Averages of Lang-Trotter counts over boxes of elliptic curves"};
    app.require_subcommand(1);
    Common c;
    std::function<void()> run;

    // classnum
    auto* classnum = app.add_subcommand("classnum", "Hurwitz class numbers H(D)");
    std::optional<i64> D;
    std::vector<i64> table;
    classnum->add_option("--D", D, "discriminant");
    classnum->add_option("--table", table, "Dmin Dmax: CSV of D,h,w,H_num,H_den")->expected(2);
    classnum->add_option("--out", c.out, "output path");
    classnum->callback([&] {
        run = [&] {
            if (D.has_value() == !table.empty()) throw ConfigError("give exactly one of --D, --table");
            if (D) {
                const Rational H = hurwitz_H(*D);
                emit(c, [&](std::ostream& os) { os << H.str() << '\n'; });
                return;
            }
            const i64 lo = std::min(table[0], table[1]), hi = std::max(table[0], table[1]);
            if (hi >= 0) throw domain_error("classnum --table: discriminants must be negative");
            emit(c, [&](std::ostream& os) {
                os << "D,h,w,H_num,H_den\n";
                for (i64 d = hi; d >= lo; --d) {
                    if (!is_discriminant(d)) continue;
                    const Rational H = hurwitz_H(d);
                    os << d << ',' << class_number_h(d) << ',' << unit_count_w(d) << ',' << H.num() << ',' << H.den() << '\n';
                }
            });
        };
    });

    // trace
    auto* trace = app.add_subcommand("trace", "trace of Frobenius of y^2 = x^3 + a x + b over F_q");
    u64 tp = 0;
    std::string ta = "0", tb = "0", modpoly;
    int tf = 1;
    trace->add_option("--p", tp, "characteristic")->required();
    trace->add_option("--a", ta, "a (comma-separated coefficients in t when f > 1)");
    trace->add_option("--b", tb, "b (likewise)");
    trace->add_option("--f", tf, "extension degree");
    trace->add_option("--modpoly", modpoly, "coefficients of the degree-f modulus, low degree first");
    trace->callback([&] {
        run = [&] {
            if (!is_prime(tp)) throw domain_error("trace: p must be prime");
            if (tf == 1 && modpoly.empty()) {
                const auto a = parse_int_vector(ta), b = parse_int_vector(tb);
                if (a.size() != 1 || b.size() != 1) throw ConfigError("trace: a and b are integers when f = 1");
                std::cout << trace_mod_p(a[0], b[0], tp) << '\n';
                return;
            }
            if (modpoly.empty()) throw ConfigError("trace: --modpoly required when f > 1");
            const PolyP g = parse_poly_p(modpoly, tp);
            if (polymod::degree(g) != tf) throw ConfigError("trace: --modpoly must have degree f");
            if (polymod::factor_squarefree(g, tp).size() != 1 || !polymod::is_squarefree(g, tp))
                throw domain_error("trace: modulus is not irreducible mod p");
            const FiniteField F(tp, g);
            const auto a = F.from_coeffs(parse_poly_p(ta, tp)), b = F.from_coeffs(parse_poly_p(tb, tp));
            std::cout << trace_mod_q(ReducedCurve{F, a, b}) << '\n';
        };
    });

    // constant
    auto* constant = app.add_subcommand("constant", "the average constant c_{K,r,1}");
    std::string method = "product", f2 = "literal";
    u64 kmax = default_K_max, nmax = default_N_max, lmax = default_L_max;
    add_common(constant, c);
    constant->add_option("--method", method, "sum, product or both");
    constant->add_option("--kmax", kmax);
    constant->add_option("--nmax", nmax);
    constant->add_option("--lmax", lmax);
    constant->add_option("--f2-table", f2, "literal or corrected 2-adic table");
    constant->callback([&] {
        run = [&] {
            const detail::Stopwatch clock;
            resolve_output(c);
            if (method != "sum" && method != "product" && method != "both") throw ConfigError("--method: sum|product|both");
            F2Table table;
            try {
                table = parse_f2_table(f2);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            const auto K = field_of(c);
            nlohmann::json estimates = nlohmann::json::array();
            std::optional<ConstantEstimate> s, p;
            if (method != "product") {
                progress("sum form, K_max=" + std::to_string(kmax) + " N_max=" + std::to_string(nmax));
                s = constant_sum(K, c.r, kmax, nmax, c.workers);
                estimates.push_back(to_json(*s));
            }
            if (method != "sum") {
                progress("product form, L_max=" + std::to_string(lmax));
                p = constant_product(K, c.r, lmax, table);
                estimates.push_back(to_json(*p));
            }
            nlohmann::json body = {{"experiment", "constant"},
                                   {"config", {{"field", field_to_json(K)}, {"r", c.r}, {"method", method}}},
                                   {"estimates", estimates}};
            if (s && p) body["relative_gap"] = std::fabs(s->value - p->value) / p->value;
            if (c.format == "csv") {
                emit(c, [&](std::ostream& os) {
                    os << "method,value,tail_estimate\n";
                    for (const auto& e : estimates)
                        os << e.at("method").get<std::string>() << ',' << detail::csv_number(e.at("value").get<double>()) << ','
                           << detail::csv_number(e.at("tail_estimate").get<double>()) << '\n';
                });
            } else {
                emit_json(c, report_document(body, clock.seconds(), c.workers));
            }
        };
    });

    // hurwitz-sum / a1-average
    auto* hsum = app.add_subcommand("hurwitz-sum", "(n_K/2) sum_p H(r^2-4p)/p against c pi_1/2(x)");
    add_common(hsum, c);
    hsum->callback([&] {
        run = [&] {
            resolve_output(c);
            const auto K = field_of(c);
            emit_report(c, hurwitz_prime_sum(K, c.r, options(c)));
        };
    });
    auto* a1 = app.add_subcommand("a1-average", "weighted L-value average A_1(x; r)");
    add_common(a1, c);
    a1->callback([&] {
        run = [&] {
            resolve_output(c);
            const auto K = field_of(c);
            emit_report(c, weighted_L_average(K, c.r, options(c)));
        };
    });

    // box-average / box-variance
    std::string box;
    std::optional<double> Cvar;
    auto* bavg = app.add_subcommand("box-average", "box average of pi_E^{r,f}(x)");
    add_common(bavg, c);
    bavg->add_option("--f", c.f, "residue degree");
    bavg->add_option("--box", box, "a1=(..);b1=(..);a2=(..);b2=(..)")->required();
    bavg->callback([&] {
        run = [&] {
            resolve_output(c);
            const auto b = box_of(box);
            const auto K = field_of(c);
            emit_report(c, box_average(K, b, c.r, c.f, options(c)));
        };
    });
    auto* bvar = app.add_subcommand("box-variance", "box variance of pi_E^{r,1}(x) about C pi_1/2(x)");
    add_common(bvar, c);
    bvar->add_option("--box", box, "a1=(..);b1=(..);a2=(..);b2=(..)")->required();
    bvar->add_option("--C", Cvar, "centering constant (default: the average constant)");
    bvar->callback([&] {
        run = [&] {
            resolve_output(c);
            const auto b = box_of(box);
            const auto K = field_of(c);
            emit_report(c, box_variance(K, b, c.r, options(c), Cvar));
        };
    });

    // deuring-check
    auto* deuring = app.add_subcommand("deuring-check", "exact check of mass(p, r) = H(r^2-4p)/2");
    u64 pmax = 199;
    deuring->add_option("--pmax", pmax)->required();
    deuring->add_option("--workers", c.workers)->check(CLI::PositiveNumber);
    deuring->add_option("--out", c.out);
    deuring->callback([&] {
        run = [&] {
            const detail::Stopwatch clock;
            const auto d = deuring_check(pmax, c.workers);
            nlohmann::json body = {{"experiment", "deuring-check"},
                                   {"config", {{"pmax", pmax}}},
                                   {"primes", d.primes},
                                   {"pairs", d.pairs},
                                   {"mismatches", d.mismatches},
                                   {"failures", d.failures}};
            emit_json(c, report_document(body, clock.seconds(), c.workers));
            if (d.mismatches) throw domain_error("Deuring identity failed for " + std::to_string(d.mismatches) + " pairs");
        };
    });

    // theta
    auto* theta = app.add_subcommand("theta", "theta_K(x; 1, q, a)");
    u64 tq = 1, tav = 1;
    add_common(theta, c, false);
    theta->add_option("--q", tq)->required();
    theta->add_option("--a", tav)->required();
    theta->callback([&] {
        run = [&] {
            resolve_output(c);
            const auto K = field_of(c);
            emit_report(c, theta_K(K, tq, tav, options(c), c.budget));
        };
    });

    // count-reductions
    auto* cred = app.add_subcommand("count-reductions", "models in a box with reduction isomorphic to a target");
    u64 p1 = 0, p2 = 0;
    std::optional<u64> root1, root2;
    std::string target1, target2;
    add_common(cred, c, false);
    cred->add_option("--box", box)->required();
    cred->add_option("--p", p1, "rational prime under the degree-1 prime")->required();
    cred->add_option("--root", root1, "root of the field polynomial mod p fixing the prime (default: smallest)");
    cred->add_option("--target", target1, "a,b of the target curve over F_p")->required();
    cred->add_option("--p2", p2);
    cred->add_option("--root2", root2);
    cred->add_option("--target2", target2);
    cred->callback([&] {
        run = [&] {
            const detail::Stopwatch clock;
            resolve_output(c);
            const auto b = box_of(box);
            const auto K = field_of(c);
            auto prime_of = [&](u64 p, std::optional<u64> root) {
                if (!is_prime(p)) throw domain_error("count-reductions: " + std::to_string(p) + " is not prime");
                const auto roots = poly_roots_mod_p(K.poly, p);
                if (roots.empty()) throw domain_error("count-reductions: no degree-1 prime above " + std::to_string(p));
                const u64 rt = root.value_or(roots.front());
                if (!std::binary_search(roots.begin(), roots.end(), rt)) throw domain_error("count-reductions: not a root mod p");
                return degree_one_prime(p, rt);
            };
            auto curve_of = [&](const std::string& s, u64 p) {
                const auto v = parse_int_vector(s);
                if (v.size() != 2) throw ConfigError("target must be \"a,b\"");
                return ReducedCurve{FiniteField(p), mod_floor(v[0], p), mod_floor(v[1], p)};
            };
            const auto P1 = prime_of(p1, root1);
            nlohmann::json body = {{"experiment", "count-reductions"},
                                   {"config", {{"field", K.name}, {"box", detail::box_json(b)}, {"p", p1}, {"target", target1}}}};
            ReductionCount rc;
            if (p2) {
                if (target2.empty()) throw ConfigError("--p2 needs --target2");
                const auto P2 = prime_of(p2, root2);
                body["config"]["p2"] = p2;
                body["config"]["target2"] = target2;
                rc = count_box_reductions_pair(K, b, curve_of(target1, p1), P1, curve_of(target2, p2), P2);
            } else {
                rc = count_box_reductions(K, b, curve_of(target1, p1), P1);
            }
            body["exact"] = rc.exact;
            body["main_term"] = rc.main_term;
            body["equidistributed"] = rc.equidistributed.str();
            if (c.format == "csv")
                emit(c, [&](std::ostream& os) {
                    os << "exact,main_term,equidistributed\n"
                       << rc.exact << ',' << detail::csv_number(rc.main_term) << ',' << rc.equidistributed.str() << '\n';
                });
            else
                emit_json(c, report_document(body, clock.seconds(), c.workers));
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const auto spill = cache_dir_from_env();
    try {
        if (spill) progress("loaded " + std::to_string(load_cache_spill(*spill)) + " cached values from " + spill->string());
        run();
        if (spill) save_cache_spill(*spill);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        // domain errors, table defects (logic_error) and arithmetic overflow
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
