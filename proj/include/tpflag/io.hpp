#ifndef TPFLAG_IO_HPP
#define TPFLAG_IO_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "flag.hpp"
#include "matrix.hpp"
#include "rational.hpp"
#include "solver.hpp"
#include "theta.hpp"
#include "totpos.hpp"

namespace tpflag {

using Json = nlohmann::json;

inline Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_json(buffer.str());
}

/// Writes to a sibling temp file, then renames over the target.
inline void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    const std::filesystem::path temp = target.string() + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + temp.string());
        out << contents;
        if (!out.flush()) throw Error("write failed for " + temp.string());
    }
    std::filesystem::rename(temp, target);
}

// Scalars. Rationals are strings "p/q"; integer JSON numbers are accepted.

inline Json to_json(const Rational& x) { return format_rational(x); }

inline Rational rational_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    throw InputError("expected a rational as \"p/q\" or an integer, got " + j.dump());
}

/// Float entries: JSON numbers, or rational strings converted to double.
inline double real_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_rational(j.get<std::string>()).get_d();
    throw InputError("expected a number, got " + j.dump());
}

inline const Json& require(const Json& j, const char* key) {
    if (!j.is_object()) throw InputError("expected a JSON object");
    const auto it = j.find(key);
    if (it == j.end()) throw InputError(std::string("missing field \"") + key + "\"");
    return *it;
}

template <typename T>
T scalar_from_json(const Json& j) {
    if constexpr (is_exact_v<T>) {
        return rational_from_json(j);
    } else {
        return real_from_json(j);
    }
}

template <typename T>
Json scalar_to_json(const T& x) {
    if constexpr (is_exact_v<T>) {
        return to_json(x);
    } else {
        return x;
    }
}

template <typename T>
Json vector_to_json(const std::vector<T>& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(scalar_to_json(x));
    return out;
}

template <typename T>
std::vector<T> vector_from_json(const Json& j) {
    if (!j.is_array()) throw InputError("expected an array, got " + j.dump());
    std::vector<T> out;
    for (const auto& x : j) out.push_back(scalar_from_json<T>(x));
    return out;
}

// Matrices: {"n": n, "entries": [[...], ...]}.

template <typename T>
Json matrix_to_json(const Matrix<T>& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(scalar_to_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return Json{{"n", m.rows()}, {"entries", std::move(rows)}};
}

template <typename T>
Matrix<T> matrix_from_json(const Json& j) {
    const Json& entries = require(j, "entries");
    if (!entries.is_array() || entries.empty()) throw InputError("\"entries\" must be a non-empty array of rows");
    const std::size_t n = entries.size();
    if (n > kMaxDimension) throw InputError("matrix dimension exceeds " + std::to_string(kMaxDimension));
    if (j.contains("n") && (!j["n"].is_number_unsigned() || j["n"].get<std::size_t>() != n)) {
        throw InputError("\"n\" does not match the number of rows");
    }
    Matrix<T> m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!entries[i].is_array() || entries[i].size() != n) throw InputError("row " + std::to_string(i + 1) + " does not have n entries");
        for (std::size_t k = 0; k < n; ++k) m(i, k) = scalar_from_json<T>(entries[i][k]);
    }
    return m;
}

// Parameters: {"word": [ints], "params": ["p/q", ...]}.

template <typename T>
Json params_to_json(const LusztigParams<T>& p) {
    return Json{{"word", p.word}, {"params", vector_to_json(p.params)}};
}

template <typename T>
LusztigParams<T> params_from_json(const Json& j) {
    LusztigParams<T> p;
    const Json& word = require(j, "word");
    if (!word.is_array()) throw InputError("\"word\" must be an array of letters");
    for (const auto& letter : word) {
        if (!letter.is_number_integer()) throw InputError("word letters must be integers");
        p.word.push_back(letter.get<int>());
    }
    p.params = vector_from_json<T>(require(j, "params"));
    if (p.word.size() != p.params.size()) throw InputError("\"word\" and \"params\" differ in length");
    return p;
}

inline Json index_to_json(const ParabolicIndex& J) { return Json(std::vector<int>(J.begin(), J.end())); }

inline ParabolicIndex index_from_json(const Json& j) {
    if (!j.is_array()) throw InputError("\"J\" must be an array of letters");
    ParabolicIndex J;
    for (const auto& letter : j) {
        if (!letter.is_number_integer()) throw InputError("\"J\" letters must be integers");
        J.insert(letter.get<int>());
    }
    return J;
}

template <typename T>
Json to_json(const FlagPoint<T>& B) {
    return Json{{"rep", matrix_to_json(B.rep)}};
}

template <typename T>
Json to_json(const ParabolicPoint<T>& P) {
    return Json{{"J", index_to_json(P.J)}, {"rep", matrix_to_json(P.rep)}};
}

template <typename T>
FlagPoint<T> flag_point_from_json(const Json& j) {
    return {matrix_from_json<T>(require(j, "rep"))};
}

template <typename T>
ParabolicPoint<T> parabolic_point_from_json(const Json& j) {
    return {index_from_json(require(j, "J")), matrix_from_json<T>(require(j, "rep"))};
}

inline Json to_json(const CellCoordinates& c) { return Json{{"v", params_to_json(c.v)}, {"zvec", vector_to_json(c.zvec)}}; }

inline CellCoordinates cell_coordinates_from_json(const Json& j) {
    return {params_from_json<Rational>(require(j, "v")), vector_from_json<Rational>(require(j, "zvec"))};
}

inline Json to_json(const PositivityVerdict& v) {
    Json out{{"member", v.member}};
    if (v.witness) {
        IndexSet rows = v.witness->rows, cols = v.witness->cols;
        for (auto& r : rows) ++r;
        for (auto& c : cols) ++c;
        out["witness"] = Json{{"factor", v.witness->factor}, {"rows", rows}, {"cols", cols}, {"sign", v.witness->sign},
                              {"description", v.witness->describe()}};
    }
    return out;
}

/// Theta instance: {"u", "uprime", "t"?: [R_1..], "z"?: [...]}.
struct ThetaInstance {
    RationalMatrix u;
    RationalMatrix uprime;
    std::optional<std::vector<Rational>> t;
    std::optional<ZVector<Rational>> z;
};

inline ThetaInstance theta_instance_from_json(const Json& j) {
    ThetaInstance inst{matrix_from_json<Rational>(require(j, "u")), matrix_from_json<Rational>(require(j, "uprime")), std::nullopt, std::nullopt};
    if (inst.u.rows() != inst.uprime.rows()) throw InputError("u and uprime differ in dimension");
    if (j.contains("t")) inst.t = vector_from_json<Rational>(j["t"]);
    if (j.contains("z")) inst.z = vector_from_json<Rational>(j["z"]);
    return inst;
}

inline Json to_json(const SolveReport& r) {
    Json limits = Json::array();
    for (const auto& l : r.limits) limits.push_back(l);
    return Json{{"solution", r.solution.coords()}, {"residual", r.residual},         {"starts_tried", r.starts_tried},
                {"converged_starts", r.converged_starts}, {"distinct_limits", r.distinct_limits}, {"iterations", r.iterations},
                {"limits", std::move(limits)}};
}

// Campaigns.

struct CampaignFiles {
    std::string csv = "campaign.csv";
    std::string summary = "campaign_summary.json";
    std::string counterexample_dir = "counterexamples";
};

inline Json to_json(const CampaignConfig& c, const CampaignFiles& files) {
    return Json{{"n", c.n},
                {"trials", c.trials},
                {"seed", c.seed},
                {"starts", c.solver.starts},
                {"max_iterations", c.solver.max_iterations},
                {"newton_tolerance", c.solver.newton_tolerance},
                {"residual_tolerance", c.solver.residual_tolerance},
                {"cluster_threshold", c.solver.cluster_threshold},
                {"membership_margin", c.solver.membership_margin},
                {"start_radius", c.solver.start_radius},
                {"threads", c.threads},
                {"csv", files.csv},
                {"summary", files.summary},
                {"counterexample_dir", files.counterexample_dir}};
}

/// Reads the fields present in j over the given defaults and validates.
inline void campaign_config_from_json(const Json& j, CampaignConfig& c, CampaignFiles& files) {
    if (!j.is_object()) throw InputError("campaign config must be a JSON object");
    static const std::vector<std::string> known{"n", "trials", "seed", "starts", "max_iterations", "newton_tolerance", "residual_tolerance",
                                                "cluster_threshold", "membership_margin", "start_radius", "threads", "csv", "summary",
                                                "counterexample_dir"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) throw InputError("unknown campaign config field \"" + key + "\"");
    }
    auto count = [&](const char* key, auto& field) {
        if (!j.contains(key)) return;
        if (!j[key].is_number_unsigned()) throw InputError(std::string("\"") + key + "\" must be a non-negative integer");
        field = j[key].get<std::remove_reference_t<decltype(field)>>();
    };
    auto real = [&](const char* key, double& field) {
        if (!j.contains(key)) return;
        if (!j[key].is_number()) throw InputError(std::string("\"") + key + "\" must be a number");
        field = j[key].get<double>();
    };
    auto text = [&](const char* key, std::string& field) {
        if (!j.contains(key)) return;
        if (!j[key].is_string()) throw InputError(std::string("\"") + key + "\" must be a string");
        field = j[key].get<std::string>();
    };
    count("n", c.n);
    count("trials", c.trials);
    count("seed", c.seed);
    count("starts", c.solver.starts);
    count("max_iterations", c.solver.max_iterations);
    count("threads", c.threads);
    real("newton_tolerance", c.solver.newton_tolerance);
    real("residual_tolerance", c.solver.residual_tolerance);
    real("cluster_threshold", c.solver.cluster_threshold);
    real("membership_margin", c.solver.membership_margin);
    real("start_radius", c.solver.start_radius);
    text("csv", files.csv);
    text("summary", files.summary);
    text("counterexample_dir", files.counterexample_dir);
}

inline void validate_campaign_config(const CampaignConfig& c) {
    if (c.n < 2 || c.n > 5) throw InputError("campaign n must satisfy 2 <= n <= 5");
    if (c.trials < 1) throw InputError("campaign trials must be >= 1");
    if (c.solver.starts < 1) throw InputError("campaign starts must be >= 1");
    for (double tol : {c.solver.newton_tolerance, c.solver.residual_tolerance, c.solver.cluster_threshold, c.solver.start_radius}) {
        if (!(tol > 0)) throw InputError("campaign tolerances must be > 0");
    }
    if (c.solver.membership_margin < 0) throw InputError("membership_margin must be >= 0");
}

/// Shortest text that reads back to the same double.
inline std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buffer[32];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buffer, sizeof buffer, "%.*g", precision, x);
        if (std::strtod(buffer, nullptr) == x) break;
    }
    return buffer;
}

inline std::string campaign_csv(const CampaignReport& report) {
    std::string out = "instance_id,n,seed,residual,starts,distinct_limits,iterations_max,roundtrip_err\n";
    for (const auto& r : report.instances) {
        out += std::to_string(r.instance_id) + "," + std::to_string(r.n) + "," + std::to_string(r.seed) + "," + format_double(r.residual) + "," +
               std::to_string(r.starts) + "," + std::to_string(r.distinct_limits) + "," + std::to_string(r.iterations_max) + "," +
               format_double(r.roundtrip_err) + "\n";
    }
    return out;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

/// Summary document. Everything except "generated_at" is a function of the config.
inline Json campaign_summary(const CampaignReport& report, const CampaignFiles& files, const std::string& generated_at) {
    Json failures = Json::array();
    for (const auto& r : report.instances) {
        if (!r.failure.empty()) failures.push_back(Json{{"instance_id", r.instance_id}, {"reason", r.failure}});
    }
    auto finite = [](double x) { return std::isfinite(x) ? Json(x) : Json(format_double(x)); };
    return Json{{"generated_at", generated_at},
                {"config", to_json(report.config, files)},
                {"instances", report.instances.size()},
                {"successes", report.successes()},
                {"success_rate", report.success_rate()},
                {"max_residual", finite(report.max_residual())},
                {"max_roundtrip_err", finite(report.max_roundtrip_err())},
                {"multi_limit_instances", report.multi_limit_instances()},
                {"failures", std::move(failures)},
                {"all_ok", report.all_ok()}};
}

inline Json counterexample_json(const InstanceResult& r) {
    Json limits = Json::array();
    for (const auto& l : r.limits) limits.push_back(l);
    return Json{{"instance_id", r.instance_id}, {"seed", r.seed},     {"u", matrix_to_json(r.u)},       {"uprime", matrix_to_json(r.uprime)},
                {"z", vector_to_json(r.z)},      {"limits", std::move(limits)}, {"distinct_limits", r.distinct_limits}};
}

/// Writes the CSV, the summary and one artifact per multi-limit instance.
inline void write_campaign(const CampaignReport& report, const CampaignFiles& files, const std::string& generated_at = utc_timestamp()) {
    write_file_atomic(files.csv, campaign_csv(report));
    write_file_atomic(files.summary, campaign_summary(report, files, generated_at).dump(2) + "\n");
    for (const auto& r : report.instances) {
        if (r.distinct_limits > 1) {
            const auto path = std::filesystem::path(files.counterexample_dir) / ("instance_" + std::to_string(r.instance_id) + ".json");
            write_file_atomic(path.string(), counterexample_json(r).dump(2) + "\n");
        }
    }
}

}  // namespace tpflag

#endif  // TPFLAG_IO_HPP
