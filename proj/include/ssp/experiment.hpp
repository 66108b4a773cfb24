#ifndef SSP_EXPERIMENT_HPP
#define SSP_EXPERIMENT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssp/params.hpp"
#include "ssp/profile.hpp"
#include "ssp/shooter.hpp"

namespace ssp::experiment {

using json = nlohmann::ordered_json;

enum class Mode { Exponents, Portrait, Shoot, Find, Lepin, Residuals };

Mode mode_from_string(const std::string& s);
std::string to_string(Mode m);

enum class OutputFormat { CSV, JSON };

// Declarative experiment description. Every integrator/shooter knob is
// surfaced; omitted fields keep the documented defaults.
struct ExperimentConfig {
    ParamTriple params{2.0, 20.0, 10.0};
    Mode mode = Mode::Exponents;
    std::vector<double> C_list;
    int K_max = 1;
    double tol_rel = 1e-12;
    double tol_abs = 1e-14;
    double tol_C = 1e-10;
    double delta = 1e-7;
    double eta_span = 80.0;
    double x_big = 0.0;  // 0: parameter-dependent default
    double drift_tol = std::numeric_limits<double>::infinity();
    double lepin_eta_end = 10.0;
    double lepin_eta_start = -30.0;
    bool parallel = true;
    std::filesystem::path out = "out";
    OutputFormat format = OutputFormat::CSV;
};

// Errors map to the documented process exit codes.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

// Parse a declarative JSON config file; unknown keys are a ConfigError.
ExperimentConfig load_config(const std::filesystem::path& file);
ExperimentConfig config_from_json(const json& j);

struct RunResult {
    json summary;
    std::vector<std::filesystem::path> files;  // artifacts written, summary last
};

// Execute the experiment and write its artifacts under config.out.
RunResult run(const ExperimentConfig& config);

// run() with the documented exit-code mapping; on failure writes a
// machine-readable error record to <out>/error.json.
int run_to_exit_code(const ExperimentConfig& config) noexcept;

shooter::ShooterOptions shooter_options(const ExperimentConfig& config);

// -------------------------------------------------------------------------
// Deterministic emission helpers

// Shortest round-trip decimal representation.
std::string format_double(double v);

// json value for a possibly infinite quantity ("inf" / "-inf" as strings).
json json_number(double v);

// Fixed CSV headers.
inline constexpr const char* kTrajectoryHeader = "eta,X,Y,Z,event";
inline constexpr const char* kProfileHeader = "xi,f";
inline constexpr const char* kExponentsHeader = "m,N,p_F,p_s,p_JL,p_L";
inline constexpr const char* kResidualsHeader = "family,xi,residual";

void write_text_file(const std::filesystem::path& path, const std::string& body);

std::string trajectory_csv(const odeint::Trajectory& traj);
std::string profile_csv(const std::vector<profile::ProfilePoint>& samples);

// Reference series for profile plots: the flat constant line and the
// singular stationary curve over [xi_lo, xi_hi].
std::string reference_flat_csv(const ParamTriple& q, double xi_lo, double xi_hi, int n);
std::string reference_singular_csv(const ParamTriple& q, double xi_lo, double xi_hi,
                                   int n);

// Columnar plot data for already-computed outcomes; empty input produces
// header-only files.
std::vector<std::filesystem::path> emit_plot_data(
    const ExperimentConfig& config, const std::vector<shooter::ShotOutcome>& outcomes);

// Minimal JSON-schema checker (type/required/properties/items/enum) used to
// validate summaries against the shipped schema.
bool validate_schema(const json& value, const json& schema, std::string* error);

}  // namespace ssp::experiment

#endif
