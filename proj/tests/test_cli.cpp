#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include "fixtures.hpp"
#include "symbolkit/errors.hpp"
#include "symbolkit/model_config.hpp"

using namespace symbolkit;
namespace fs = std::filesystem;

namespace {

const fs::path kModels = SYMBOLKIT_MODELS_DIR;

Json doc(const std::string& body) {
    Json j = Json::parse(body);
    j["schema"] = kModelSchema;
    return j;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("symbolkit_cli_" + name);
    fs::remove_all(p);
    return p;
}

int run(const std::string& args) {
    const std::string cmd = std::string(SYMBOLKIT_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Json read_json(const fs::path& p) {
    std::ifstream is(p);
    return Json::parse(is);
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream is(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        out[fs::relative(e.path(), dir).string()] = ss.str();
    }
    return out;
}

}  // namespace

TEST(ModelConfig, BundledModelsLoad) {
    int count = 0;
    for (const auto& e : fs::directory_iterator(kModels)) {
        if (e.path().extension() != ".model") continue;
        EXPECT_NO_THROW(load_model(e.path())) << e.path();
        ++count;
    }
    EXPECT_GE(count, 10);
}

TEST(ModelConfig, BrownianModel) {
    const StateModel m = load_model(kModels / "bm.model");
    const Complex p = eval_symbol(m, fixtures::vec1(0.0), fixtures::vec1(2.0));
    EXPECT_DOUBLE_EQ(p.real(), 2.0);
    EXPECT_DOUBLE_EQ(p.imag(), 0.0);
}

TEST(ModelConfig, StableLikeIndexRange) {
    const StateModel m = load_model(kModels / "stable_like.model");
    for (double x : {-100.0, -1.0, 0.0, 3.0, 100.0}) {
        LocalCoefficients c;
        m.coefficients_at(fixtures::vec1(x), c);
        EXPECT_GT(c.alpha, 0.3);
        EXPECT_LE(c.alpha, 0.7);
    }
}

TEST(ModelConfig, NegativeKillingRateReportsPoint) {
    try {
        build_model(parse_model_config(doc(R"j({"dim": 1, "mode": "autonomous", "killing_rate": "-1"})j")));
        FAIL() << "expected a model error";
    } catch (const ModelError& e) {
        EXPECT_NE(std::string(e.what()).find("killing_rate negative at x="), std::string::npos) << e.what();
    }
}

TEST(ModelConfig, NonPsdCovarianceReportsPoint) {
    EXPECT_THROW(build_model(parse_model_config(doc(R"j({"dim": 1, "mode": "autonomous", "covariance": [["x1"]]})j"))),
                 ModelError);
}

TEST(ModelConfig, UnknownFieldIsRejected) {
    try {
        parse_model_config(doc(R"j({"dim": 1, "mode": "levy", "drfit": ["1"]})j"));
        FAIL() << "expected a config error";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "drfit");
    }
    EXPECT_THROW(parse_model_config(doc(R"j({"dim": 1, "measure": {"kind": "stable", "alpha": "1", "beta": "0"}})j")),
                 ConfigError);
}

TEST(ModelConfig, SchemaMustMatch) {
    Json j = doc(R"j({"dim": 1})j");
    j["schema"] = "symbolkit-model/2";
    EXPECT_THROW(parse_model_config(j), ConfigError);
    j.erase("schema");
    EXPECT_THROW(parse_model_config(j), ConfigError);
}

TEST(ModelConfig, ExpressionErrorsSurface) {
    EXPECT_THROW(parse_model_config(doc(R"j({"dim": 1, "killing_rate": "x2"})j")), Error);
    EXPECT_THROW(parse_model_config(doc(R"j({"dim": 1, "killing_rate": "1 +"})j")), Error);
}

TEST(ModelConfig, SimulationDefaults) {
    const ModelConfig c = load_model_config(kModels / "sde_cauchy.model");
    EXPECT_EQ(c.simulation.x0(0), 1.0);
    EXPECT_EQ(c.spec.mode, ModelMode::sde);
}

TEST(Cli, SymbolReportsAnalyticValue) {
    const fs::path out = scratch("symbol");
    ASSERT_EQ(run("symbol --model " + (kModels / "bm.model").string() + " --x 0 --xi 2 --paths 2000 --out " +
                  out.string()),
              0);
    const Json j = read_json(out / "symbol.json");
    EXPECT_DOUBLE_EQ(j["reports"][0]["analytic"]["re"].get<double>(), 2.0);
    EXPECT_TRUE(fs::exists(out / "symbol.csv"));
}

TEST(Cli, CauchyOriginIndex) {
    const fs::path out = scratch("indices");
    ASSERT_EQ(run("indices --model " + (kModels / "cauchy.model").string() +
                  " --direction origin --rmin 1e2 --rmax 1e6 --out " + out.string()),
              0);
    const Json j = read_json(out / "indices.json");
    EXPECT_NEAR(j["indices"]["beta0"].get<double>(), 1.0, 0.05);
    EXPECT_TRUE(fs::exists(out / "slopes.csv"));
}

TEST(Cli, KillingSuitePasses) {
    const fs::path out = scratch("verify");
    EXPECT_EQ(run("verify --model " + (kModels / "killed_levy.model").string() + " --suite killing --paths 20000 --out " +
                  out.string()),
              0);
    EXPECT_TRUE(fs::exists(out / "verify.json"));
}

TEST(Cli, ExitCodes) {
    const fs::path out = scratch("codes");
    EXPECT_EQ(run("symbol --model /nonexistent.model --x 0 --xi 1 --out " + out.string()), 2);
    EXPECT_EQ(run("symbol --model " + (kModels / "bm.model").string() + " --out " + out.string()), 2);
    EXPECT_EQ(run("frobnicate --model " + (kModels / "bm.model").string()), 2);
    const fs::path bad = scratch("bad.model");
    std::ofstream(bad) << R"({"schema": "symbolkit-model/1", "dim": 1, "killing_rate": "-1"})";
    EXPECT_EQ(run("conditions --model " + bad.string() + " --out " + out.string()), 2);
    fs::remove(bad);
}

TEST(Cli, Deterministic) {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    const std::string args = "simulate --model " + (kModels / "compound_poisson.model").string() + " --paths 20 --seed 9";
    ASSERT_EQ(run(args + " --out " + a.string()), 0);
    ASSERT_EQ(run(args + " --out " + b.string()), 0);
    const auto sa = snapshot(a), sb = snapshot(b);
    EXPECT_EQ(sa.size(), 21u);
    EXPECT_EQ(sa, sb);
    const fs::path c = scratch("det_c");
    ASSERT_EQ(run("symbol --model " + (kModels / "bm.model").string() + " --x 0 --xi 1 --paths 500 --out " + c.string()), 0);
    const fs::path d = scratch("det_d");
    ASSERT_EQ(run("symbol --model " + (kModels / "bm.model").string() + " --x 0 --xi 1 --paths 500 --out " + d.string()), 0);
    EXPECT_EQ(snapshot(c), snapshot(d));
}
