#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hamflow/errors.hpp"
#include "hamflow/outputs.hpp"
#include "hamflow/run.hpp"

using namespace hamflow;

namespace {

const char* kSpectrumConfig = R"(
command = spectrum
seed = 7

[domain]
dim = 1
length_1 = 3.14159265358979312
boundary = dirichlet
period = 6.28318530717958623
m = 1

[truncation]
k_max = 2
spatial_cutoff = 4.5

[output]
dir = out_test_spectrum
)";

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("config parsing: values, sections, defaults") {
    RunConfig rc = RunConfig::from_text(kSpectrumConfig, Command::Spectrum);
    CHECK(rc.seed == 7);
    CHECK(rc.domain.dim == 1);
    CHECK(rc.domain.boundary == Boundary::Dirichlet);
    CHECK(rc.k_max == 2);
    CHECK(rc.oversample == 2.0);
    CHECK(rc.output_dir == "out_test_spectrum");
}

TEST_CASE("unknown keys are rejected with the key named") {
    std::string bad = kSpectrumConfig;
    bad += "\n[truncation]\noversamplee = 2\n";  // misspelled key
    try {
        RunConfig::from_text(bad, Command::Spectrum);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("oversamplee") != std::string::npos);
    }
    // a missing required key also names itself
    std::string missing = kSpectrumConfig;
    missing.replace(missing.find("k_max = 2"), 9, "# k_max  ");
    try {
        RunConfig::from_text(missing, Command::Spectrum);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("truncation.k_max") != std::string::npos);
    }
}

TEST_CASE("command mismatch between file and CLI is a config error") {
    CHECK_THROWS_AS(RunConfig::from_text(kSpectrumConfig, Command::Flow), ConfigError);
}

TEST_CASE("malformed values are config errors") {
    std::string bad = kSpectrumConfig;
    bad.replace(bad.find("k_max = 2"), 9, "k_max = x");
    CHECK_THROWS_AS(RunConfig::from_text(bad, Command::Spectrum), ConfigError);
    std::string dup = kSpectrumConfig;
    dup += "\n[truncation]\nk_max = 3\n";
    CHECK_THROWS_AS(RunConfig::from_text(dup, Command::Spectrum), ConfigError);
}

TEST_CASE("spectrum run writes deterministic CSV bytes and a manifest") {
    RunConfig rc = RunConfig::from_text(kSpectrumConfig, Command::Spectrum);
    std::ostringstream log;
    rc.output_dir = "out_test_a";
    REQUIRE(run_config(rc, log) == 0);
    rc.output_dir = "out_test_b";
    REQUIRE(run_config(rc, log) == 0);
    const std::string a = slurp("out_test_a/spectrum.csv");
    const std::string b = slurp("out_test_b/spectrum.csv");
    CHECK(!a.empty());
    CHECK(a == b);
    CHECK(slurp("out_test_a/manifest.json").find(
              config_hash(rc.config_text, rc.seed, "spectrum")) != std::string::npos);
    std::filesystem::remove_all("out_test_a");
    std::filesystem::remove_all("out_test_b");
}

TEST_CASE("index command reproduces the corrected pencil count and exit codes") {
    const std::string cfg = std::string(R"(
[domain]
dim = 1
length_1 = 3.14159265358979312
boundary = dirichlet
period = 6.28318530717958623
m = 1

[truncation]
k_max = 8
spatial_cutoff = 64.5

[index]
b_kind = scalar
b_value = 1.5
)");
    RunConfig rc = RunConfig::from_text(cfg, Command::IndexCmd);
    rc.output_dir = "out_test_index";
    std::ostringstream log;
    CHECK(run_config(rc, log) == 0);
    // sqrt(2) < 1.5 puts three eigenvalues in [0, 1.5): mu = 3
    CHECK(slurp("out_test_index/index_certificate.json").find("\"mu\": 3") != std::string::npos);
    std::filesystem::remove_all("out_test_index");
}

TEST_CASE("flow command emits crossings consistent with the index difference") {
    const std::string cfg = std::string(R"(
[domain]
dim = 1
length_1 = 3.14159265358979312
boundary = dirichlet
period = 6.28318530717958623
m = 1

[truncation]
k_max = 6
spatial_cutoff = 36.5

[index]
b_kind = scalar
b_value = 0.5
b2_kind = scalar
b2_value = 2.5
flow_steps = 16
)");
    RunConfig rc = RunConfig::from_text(cfg, Command::Flow);
    rc.output_dir = "out_test_flow";
    std::ostringstream log;
    CHECK(run_config(rc, log) == 0);
    const std::string j = slurp("out_test_flow/flow.json");
    CHECK(j.find("\"flow\": 5") != std::string::npos);
    CHECK(j.find("\"consistent\": true") != std::string::npos);
    std::filesystem::remove_all("out_test_flow");
}

TEST_CASE("solver failure surfaces as exit code 3") {
    // B = I hits the eigenvalue 1 of L: the outer pencil is fine but the
    // reduced Newton cannot reach the unconstrained tolerance on a singular
    // affine system, so every start fails
    const std::string cfg = std::string(R"(
[domain]
dim = 1
length_1 = 3.14159265358979312
boundary = dirichlet
period = 6.28318530717958623
m = 1

[truncation]
k_max = 2
spatial_cutoff = 4.5

[window]
l_h = 1.2

[model]
kind = linear_forced
lipschitz = 1.1
b_kind = scalar
b_value = 1.0
forcing_kind = modes
forcing_mode_count = 1
forcing_mode_1 = 0 const 1 0 1.0

[solve]
eps = 0.0
lambda = 1.0

[solver]
newton_cap = 8
)");
    RunConfig rc = RunConfig::from_text(cfg, Command::Solve);
    rc.output_dir = "out_test_fail";
    std::ostringstream log;
    CHECK(run_config(rc, log) == 3);
    std::filesystem::remove_all("out_test_fail");
}

TEST_CASE("exit code taxonomy") {
    CHECK(exit_code_for(ConfigError("m", "o", "x")) == 1);
    CHECK(exit_code_for(IoError("m", "o", "x")) == 1);
    CHECK(exit_code_for(PreconditionError("m", "o", "x")) == 1);
    CHECK(exit_code_for(MonitorError("m", "o", "x")) == 2);
    CHECK(exit_code_for(SolverError("m", "o", "x")) == 3);
    CHECK(exit_code_for(SingularOperatorError("m", "o", "x")) == 3);
    CHECK(exit_code_for(NonStabilizedError("m", "o", "x")) == 3);
    CHECK(exit_code_for(UnresolvedCrossingError("m", "o", "x")) == 3);
    CHECK(exit_code_for(DivergenceError("m", "o", "x")) == 3);
}

TEST_CASE("homotopy command writes trace, field, summary, audit") {
    const std::string cfg = std::string(R"(
seed = 3

[domain]
dim = 1
length_1 = 3.14159265358979312
boundary = dirichlet
period = 6.28318530717958623
m = 1

[truncation]
k_max = 3
spatial_cutoff = 9.5

[window]
l_h = 1.2

[model]
kind = saturating
lipschitz = 1.2
b_kind = scalar
b_value = 0.5
m2 = 0.3
sign = -1
forcing_kind = none

[schedule]
mode = regularized
eps0 = 0.05
eps_levels = 2
lambda_steps = 4
compute_degree = 0
)");
    RunConfig rc = RunConfig::from_text(cfg, Command::Homotopy);
    rc.output_dir = "out_test_hom";
    std::ostringstream log;
    CHECK(run_config(rc, log) == 0);
    CHECK(std::filesystem::exists("out_test_hom/trace.csv"));
    CHECK(std::filesystem::exists("out_test_hom/final_field.bin"));
    CHECK(std::filesystem::exists("out_test_hom/summary.json"));
    CHECK(std::filesystem::exists("out_test_hom/audit.json"));
    CHECK(slurp("out_test_hom/summary.json").find("\"all_pass\": true") != std::string::npos);
    std::filesystem::remove_all("out_test_hom");
}
