// tpflag: command-line front end.
//
// Exit codes: 0 ok, 1 negative verdict, 2 input error, 3 domain error,
// 4 convergence failure.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <tpflag/flag.hpp>
#include <tpflag/io.hpp>
#include <tpflag/solver.hpp>
#include <tpflag/theta.hpp>
#include <tpflag/totpos.hpp>

using namespace tpflag;

namespace {

enum Exit { kOk = 0, kNegative = 1, kInput = 2, kDomain = 3, kConvergence = 4 };

struct Globals {
    std::uint64_t seed = 0;
    std::string config;
    std::string output;
    double tolerance = 0.0;  // 0: keep defaults
};

Json read_input(const std::string& path) {
    if (path == "-") {
        std::stringstream buffer;
        buffer << std::cin.rdbuf();
        return parse_json(buffer.str());
    }
    return read_json_file(path);
}

void emit(const Globals& g, const Json& result) {
    const std::string text = result.dump(2) + "\n";
    if (g.output.empty()) {
        std::cout << text;
    } else {
        write_file_atomic(g.output, text);
    }
}

ParabolicIndex parse_index(const std::string& text) {
    ParabolicIndex J;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            const int letter = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            J.insert(letter);
        } catch (const std::logic_error&) {
            throw InputError("--J expects comma-separated letters, got \"" + text + "\"");
        }
    }
    return J;
}

SolverConfig solver_config(const Globals& g) {
    CampaignConfig c;
    CampaignFiles files;
    if (!g.config.empty()) campaign_config_from_json(read_json_file(g.config), c, files);
    c.solver.seed = g.seed;
    if (g.tolerance > 0) c.solver.residual_tolerance = g.tolerance;
    return c.solver;
}

FlagConfig flag_config(const Globals& g) {
    FlagConfig c;
    if (g.tolerance > 0) c.line_tolerance = g.tolerance;
    return c;
}

/// Non-members of G_{>0} get exit 1 with the witness.
bool reject_non_positive(const Globals& g, const RationalMatrix& m) {
    const PositivityVerdict v = is_g_positive(m);
    if (v.member) return false;
    emit(g, to_json(v));
    return true;
}

int cmd_check(const Globals& g, const std::string& path, const std::string& kind) {
    const RationalMatrix m = matrix_from_json<Rational>(read_input(path));
    if (m.rows() > kMaxPositivityDimension) throw InputError("positivity tests support n <= 6");
    PositivityVerdict v;
    if (kind == "g-positive") {
        v = is_g_positive(m);
    } else {
        const Triangle which = kind == "lower" ? Triangle::Lower : Triangle::Upper;
        if (!is_unit_triangular(m, which)) throw InputError("matrix is not unit " + kind + " triangular");
        v = is_totally_positive_unitriangular(m, which);
    }
    Json out = to_json(v);
    out["kind"] = kind;
    emit(g, out);
    return v.member ? kOk : kNegative;
}

int cmd_theta_forward(const Globals& g, const std::string& path) {
    const ThetaInstance inst = theta_instance_from_json(read_input(path));
    if (!inst.t) throw InputError("theta forward needs \"t\"");
    if (inst.t->size() + 1 != inst.u.rows()) throw InputError("\"t\" must have n-1 coordinates");
    const TorusPoint<Rational> t(*inst.t);
    emit(g, Json{{"z", vector_to_json(theta_forward(inst.u, inst.uprime, t))}});
    return kOk;
}

int cmd_theta_solve(const Globals& g, const std::string& path, const std::string& method_name) {
    const ThetaInstance inst = theta_instance_from_json(read_input(path));
    if (!inst.z) throw InputError("theta solve needs \"z\"");
    const std::size_t n = inst.u.rows();
    if (inst.z->size() + 1 != n) throw InputError("\"z\" must have n-1 components");
    const bool closed = method_name == "closed" || (method_name == "auto" && n <= 3);
    if (method_name == "closed" && n > 3) throw InputError("--method closed requires n <= 3");
    for (const auto* m : {&inst.u, &inst.uprime}) {
        if (!is_unit_triangular(*m, Triangle::Lower)) throw InputError("u and uprime must be unit lower triangular");
        const auto v = is_totally_positive_unitriangular(*m, Triangle::Lower);
        if (!v.member) throw DomainError("u and uprime must be in U-_{>0}: " + v.witness->describe());
    }
    if (!closed) {
        Json out = to_json(theta_inverse_numeric(inst.u, inst.uprime, *inst.z, solver_config(g)));
        out["method"] = "numeric";
        emit(g, out);
        return kOk;
    }
    Json out{{"method", "closed"}};
    TorusPoint<double> t;
    if (n == 2) {
        const TorusPoint<Rational> exact = theta_inverse_sl2(inst.u, inst.uprime, *inst.z);
        out["t_exact"] = vector_to_json(exact.coords());
        t = TorusPoint<double>({exact[0].get_d()});
    } else {
        const Sl3Preimages pre = theta_sl3_preimages(inst.u, inst.uprime, *inst.z);
        t = pre.accepted;
        out["rejected"] = pre.rejected;
    }
    const auto z = theta_forward(matrix_cast<double>(inst.u), matrix_cast<double>(inst.uprime), t);
    double residual = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        const double target = (*inst.z)[j].get_d();
        residual = std::max(residual, std::abs(z[j] - target) / target);
    }
    out["solution"] = t.coords();
    out["residual"] = residual;
    emit(g, out);
    return kOk;
}

int cmd_verify(const Globals& g, const CampaignConfig& overrides, const std::vector<std::string>& set_fields) {
    CampaignConfig c;
    CampaignFiles files;
    if (!g.config.empty()) campaign_config_from_json(read_json_file(g.config), c, files);
    for (const auto& field : set_fields) {
        if (field == "n") c.n = overrides.n;
        if (field == "trials") c.trials = overrides.trials;
        if (field == "starts") c.solver.starts = overrides.solver.starts;
        if (field == "threads") c.threads = overrides.threads;
        if (field == "seed") c.seed = g.seed;
    }
    if (g.tolerance > 0) c.solver.residual_tolerance = g.tolerance;
    if (!g.output.empty()) files.summary = g.output;
    validate_campaign_config(c);
    const CampaignReport report = verify_conjecture(c);
    const std::string stamp = utc_timestamp();
    write_campaign(report, files, stamp);
    std::cout << campaign_summary(report, files, stamp).dump(2) << "\n";
    return report.all_ok() ? kOk : kConvergence;
}

int cmd_flag(const Globals& g, const std::string& sub, const std::string& path, const std::string& J_text, const std::string& flag_path,
             bool exact, bool inverse) {
    const FlagConfig config = flag_config(g);
    if (sub == "sigma" && inverse) {
        if (flag_path.empty()) throw InputError("flag sigma --inverse needs --flag");
        const CellCoordinates coords = cell_coordinates_from_json(read_input(path));
        const FlagPoint<Rational> B = flag_point_from_json<Rational>(read_json_file(flag_path));
        if (B.rep.rows() == 2) {
            try {
                emit(g, Json{{"g", matrix_to_json(sigma_b_inverse_exact(coords, B))}});
                return kOk;
            } catch (const DomainError&) {
                // t has no rational diagonal form; fall through to floats.
            }
        }
        emit(g, Json{{"g", matrix_to_json(sigma_b_inverse(coords, B, InverseMethod::Auto, solver_config(g)))}});
        return kOk;
    }
    const RationalMatrix m = matrix_from_json<Rational>(read_input(path));
    if (sub == "split") {
        const auto s = split_cell(m, parse_index(J_text));
        emit(g, Json{{"parabolic", matrix_to_json(s.parabolic)}, {"fibre", matrix_to_json(s.fibre)},
                     {"parabolic_params", params_to_json(s.parabolic_params)}, {"fibre_params", params_to_json(s.fibre_params)}});
        return kOk;
    }
    if (m.rows() > kMaxPositivityDimension) throw InputError("flag commands support n <= 6");
    if (reject_non_positive(g, m)) return kNegative;
    if (sub == "zeta") {
        const FlagPoint<double> B = zeta(m, config);
        if (!exact) {
            emit(g, to_json(B));
            return kOk;
        }
        const auto snapped = snap_flag_point(B, m, config.snap_tolerance);
        if (!snapped) throw DomainError("zeta: no rational representative within the snap tolerance");
        emit(g, to_json(*snapped));
        return kOk;
    }
    if (sub == "classify") {
        const Classification c = classify(m, parse_index(J_text), config);
        Json checks = Json::array();
        for (const auto& k : c.checks) {
            checks.push_back(Json{{"j", k.j},
                                  {"perron_positive", k.perron_positive},
                                  {"eigenflag_distance", k.eigenflag_distance},
                                  {"parabolic_distance", k.parabolic_distance}});
        }
        emit(g, Json{{"point", to_json(c.point)}, {"perron_checks", checks}, {"consistent", c.consistent}});
        if (!c.consistent) throw DomainError("Perron-line cross-check failed");
        return kOk;
    }
    // sigma
    FlagPoint<Rational> B;
    if (!flag_path.empty()) {
        B = flag_point_from_json<Rational>(read_json_file(flag_path));
    } else {
        const auto snapped = snap_flag_point(zeta(m, config), m, config.snap_tolerance);
        if (!snapped) throw DomainError("sigma: zeta(g) has no rational representative; pass --flag");
        B = *snapped;
    }
    Json out = to_json(sigma_b(m, B));
    out["flag"] = to_json(B);
    emit(g, out);
    return kOk;
}

int cmd_sample(const Globals& g, const std::string& kind, std::size_t n, const std::string& J_text) {
    if (n < 2 || n > kMaxPositivityDimension) throw InputError("--n must satisfy 2 <= n <= 6");
    if (kind == "g-positive") {
        emit(g, matrix_to_json(sample_g_positive(n, g.seed)));
    } else if (kind == "lower" || kind == "upper") {
        emit(g, matrix_to_json(sample_unipotent(n, kind == "lower" ? Triangle::Lower : Triangle::Upper, g.seed)));
    } else if (kind == "parabolic") {
        emit(g, to_json(sample_parabolic_point(n, parse_index(J_text), g.seed)));
    } else {
        const FibreSample f = sample_fibre_element(n, g.seed);
        emit(g, Json{{"g", matrix_to_json(f.g)}, {"flag", to_json(f.B)}, {"v", params_to_json(f.v)}, {"torus", vector_to_json(f.torus)},
                     {"zvec", vector_to_json(f.zvec)}});
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Totally positive SL_n: positivity tests, the map Theta, and flag decompositions"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Seed for all randomness")->capture_default_str();
    app.add_option("--config", g.config, "Campaign/solver config file (JSON)");
    app.add_option("--output", g.output, "Write the JSON result here instead of stdout");
    app.add_option("--tolerance", g.tolerance, "Override the residual (theta) or line (flag) tolerance")->check(CLI::PositiveNumber);

    std::string path = "-", kind, method = "auto", J_text, flag_path;
    bool exact = false, inverse = false;
    std::size_t n = 3;
    CampaignConfig overrides;

    auto* check = app.add_subcommand("check", "Positivity verdict for a matrix");
    check->add_option("matrix", path, "Matrix JSON file, - for stdin")->required();
    check->add_option("--kind", kind, "lower | upper | g-positive")->required()->check(CLI::IsMember({"lower", "upper", "g-positive"}));

    auto* theta = app.add_subcommand("theta", "Forward map and inverse of Theta");
    theta->require_subcommand(1);
    theta->fallthrough();
    auto* forward = theta->add_subcommand("forward", "z(u, u', t)");
    forward->add_option("instance", path, "Instance JSON with u, uprime, t")->required();
    auto* solve = theta->add_subcommand("solve", "t with z(u, u', t) = z");
    solve->add_option("instance", path, "Instance JSON with u, uprime, z")->required();
    solve->add_option("--method", method, "auto | closed | numeric")->check(CLI::IsMember({"auto", "closed", "numeric"}));

    auto* verify = app.add_subcommand("verify", "Multi-start campaign for the bijectivity of Theta");
    verify->add_option("--n", overrides.n, "Dimension");
    verify->add_option("--trials", overrides.trials, "Number of instances");
    verify->add_option("--starts", overrides.solver.starts, "Starts per solve");
    verify->add_option("--threads", overrides.threads, "Worker threads, 0 = all cores");

    auto* flag = app.add_subcommand("flag", "Totally positive flags");
    flag->require_subcommand(1);
    flag->fallthrough();
    auto* zeta_cmd = flag->add_subcommand("zeta", "The Borel of B_{>0} containing g");
    zeta_cmd->add_option("matrix", path)->required();
    zeta_cmd->add_flag("--exact", exact, "Snap to a rational representative and verify it exactly");
    auto* classify_cmd = flag->add_subcommand("classify", "The parabolic of P^J_{>0} containing g");
    classify_cmd->add_option("matrix", path)->required();
    classify_cmd->add_option("--J", J_text, "Comma-separated letters of J");
    auto* sigma_cmd = flag->add_subcommand("sigma", "Cell coordinates of g in B cap G_{>0}");
    sigma_cmd->add_option("input", path, "g (or coordinates with --inverse)")->required();
    sigma_cmd->add_option("--flag", flag_path, "FlagPoint JSON of B (default: exact zeta(g))");
    sigma_cmd->add_flag("--inverse", inverse, "Rebuild g from coordinates");
    auto* split_cmd = flag->add_subcommand("split", "u1 = u1' u1'' for the parabolic J");
    split_cmd->add_option("matrix", path)->required();
    split_cmd->add_option("--J", J_text, "Comma-separated letters of J");

    auto* sample = app.add_subcommand("sample", "Seeded sample points");
    sample->add_option("--kind", kind, "g-positive | lower | upper | parabolic | fibre")
        ->required()
        ->check(CLI::IsMember({"g-positive", "lower", "upper", "parabolic", "fibre"}));
    sample->add_option("--n", n, "Dimension");
    sample->add_option("--J", J_text, "Comma-separated letters of J (parabolic)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    try {
        if (*check) return cmd_check(g, path, kind);
        if (*forward) return cmd_theta_forward(g, path);
        if (*solve) return cmd_theta_solve(g, path, method);
        if (*verify) {
            std::vector<std::string> set;
            for (const char* name : {"n", "trials", "starts", "threads"}) {
                if (verify->count(std::string("--") + name)) set.emplace_back(name);
            }
            if (app.count("--seed")) set.emplace_back("seed");
            return cmd_verify(g, overrides, set);
        }
        for (auto* sub : {zeta_cmd, classify_cmd, sigma_cmd, split_cmd}) {
            if (*sub) return cmd_flag(g, sub->get_name(), path, J_text, flag_path, exact, inverse);
        }
        if (*sample) return cmd_sample(g, kind, n, J_text);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInput;
    } catch (const std::out_of_range& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInput;
    } catch (const NoConvergence& e) {
        std::cerr << "no convergence: " << e.what() << "\n";
        return kConvergence;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    }
    return kInput;
}
