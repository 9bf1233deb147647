#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "droplet_dft/cli.hpp"

using namespace droplet_dft;
namespace fs = std::filesystem;
using cli::json;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("droplet_dft_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

json load_config(const std::string& command) {
    std::ifstream in(fs::path(DROPLET_DFT_CONFIGS) / (command + ".json"));
    return json::parse(in);
}

int run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + DROPLET_DFT_CLI + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

// ------------------------------------------------------------ reference data

TEST(ReferenceData, EmptyInput) {
    std::istringstream in("");
    EXPECT_TRUE(parse_reference(in, 1.0, 1.0).empty());
    std::istringstream comments("# only a comment\n\n   \n");
    EXPECT_TRUE(parse_reference(comments, 1.0, 1.0).empty());
}

TEST(ReferenceData, IdentityScaling) {
    std::istringstream in("1.0, 2.0\n2.5 -3.0\n4\t5e-3\n");
    const auto ds = parse_reference(in, 1.0, 1.0);
    ASSERT_EQ(ds.size(), 3u);
    EXPECT_EQ(ds.rows[0].x, 1.0);
    EXPECT_EQ(ds.rows[1].y, -3.0);
    EXPECT_EQ(ds.rows[2].y, 5e-3);
}

TEST(ReferenceData, ScaledRoundTrip) {
    const std::string text = "# n/n0, E/E0 from a Monte Carlo run\n0.1, -0.2\n0.37, -0.55 # trailing\n1.9, 0.4\n";
    const double n0 = 3.1e-6, e0 = 7.7e-9;
    std::istringstream in(text);
    const auto ds = parse_reference(in, n0, e0, "mc");
    std::ostringstream back;
    for (const auto& r : ds.rows) back << csv::format_number(r.x) << ',' << csv::format_number(r.y) << '\n';
    std::istringstream again(back.str());
    const auto inv = parse_reference(again, 1.0 / n0, 1.0 / e0);
    std::istringstream orig(text);
    const auto ref = parse_reference(orig, 1.0, 1.0);
    ASSERT_EQ(inv.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        EXPECT_NEAR(inv.rows[i].x, ref.rows[i].x, 1e-14 * std::abs(ref.rows[i].x) + 1e-14);
        EXPECT_NEAR(inv.rows[i].y, ref.rows[i].y, 1e-14 * std::abs(ref.rows[i].y) + 1e-14);
    }
    EXPECT_EQ(ds.source, "mc");
}

TEST(ReferenceData, NonNumericRowNamesLine) {
    std::istringstream in("1, 2\n# note\n3, abc\n");
    try {
        parse_reference(in, 1.0, 1.0);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    std::istringstream three("1, 2, 3\n");
    EXPECT_THROW(parse_reference(three, 1.0, 1.0), ParseError);
    std::istringstream inf("1, inf\n");
    EXPECT_THROW(parse_reference(inf, 1.0, 1.0), ParseError);
}

TEST(ReferenceData, NonMonotoneRejected) {
    std::istringstream in("1, 2\n1, 3\n");
    EXPECT_THROW(parse_reference(in, 1.0, 1.0), ValidationError);
    std::istringstream zero("1, 2\n");
    EXPECT_THROW(parse_reference(zero, 0.0, 1.0), ValidationError);
    EXPECT_THROW(ingest_reference("/nonexistent/reference.csv", 1.0, 1.0), ValidationError);
}

// ------------------------------------------------------------ run()

TEST(RunConfig, EveryExampleRuns) {
    for (const auto& command : cli::commands()) {
        const auto out = cli::run(command, load_config(command));
        std::istringstream in(out.csv);
        std::string header;
        std::getline(in, header);
        std::istringstream cols(header);
        for (std::string col; std::getline(cols, col, ',');) {
            EXPECT_EQ(col.back(), ']') << command << ": " << col;
            EXPECT_NE(col.find('['), std::string::npos) << command << ": " << col;
        }
        EXPECT_EQ(out.csv.find('\r'), std::string::npos);
        EXPECT_EQ(out.meta["command"], command);
    }
}

TEST(RunConfig, EosValues) {
    json cfg = {{"params",
                 {{"a11_bohr", 50.0},
                  {"a12_bohr", -55.0},
                  {"density", {{"min", 1e-6}, {"max", 1e-4}, {"points", 3}, {"unit", "internal"}}}}}};
    const auto out = cli::run("eos", cfg);
    std::istringstream in(out.csv);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    EXPECT_EQ(line.substr(0, 17), "1.00000000000e-06");
    const double e = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_NEAR(e / eos_symmetric(1e-6, 1.0, -1.1), 1.0, 1e-11);
    EXPECT_NEAR(out.meta["n_eq[a11^-3]"].get<double>() / equilibrium_density(1.0, -1.1), 1.0, 1e-15);
}

TEST(RunConfig, PhysicalDensityUnits) {
    json cfg = {{"params",
                 {{"a11_bohr", 60.0},
                  {"a12_bohr", -63.0},
                  {"density", {{"min", 1.0}, {"max", 2.0}, {"points", 2}, {"unit", "um^-3"}}}}}};
    const auto out = cli::run("eos", cfg);
    const double l = 60.0 * PhysicalConstants::codata2018().bohr_radius;
    std::istringstream in(out.csv);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    EXPECT_NEAR(std::stod(line.substr(0, line.find(','))) / (1e18 * l * l * l), 1.0, 1e-11);
    EXPECT_EQ(line.substr(line.find(',') + 1, 17), "1.00000000000e+00");
}

TEST(RunConfig, ValidationMessagesNameTheKey) {
    auto expect_message = [](const std::string& command, const json& cfg, const std::string& fragment) {
        try {
            cli::run(command, cfg);
            ADD_FAILURE() << "expected ValidationError for " << fragment;
        } catch (const ValidationError& e) {
            EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
        }
    };
    json good = load_config("eos");
    json c = good;
    c["params"]["a11"] = 1.0;
    expect_message("eos", c, "params.a11");
    c = good;
    c["params"].erase("a12_bohr");
    expect_message("eos", c, "params.a12_bohr");
    c = good;
    c["params"]["density"]["unit"] = "furlong^-3";
    expect_message("eos", c, "params.density.unit");
    c = good;
    c["params"]["a11_bohr"] = "sixty";
    expect_message("eos", c, "params.a11_bohr");
    c = good;
    c["params"]["density"]["points"] = 2.5;
    expect_message("eos", c, "params.density.points");
    expect_message("stability", good, "command");
    c = good;
    c["extra"] = 1;
    expect_message("eos", c, "extra");
    expect_message("nonsense", json{{"params", json::object()}}, "nonsense");
    c = load_config("gprime");
    c["params"]["eps_dd"] = 1.2;
    expect_message("gprime", c, "exactly one");
}

TEST(RunConfig, ExitCodeMapping) {
    EXPECT_EQ(cli::exit_code(ValidationError("x")), cli::validation);
    EXPECT_EQ(cli::exit_code(ParseError("x", 3)), cli::validation);
    EXPECT_EQ(cli::exit_code(DomainError("x")), cli::validation);
    EXPECT_EQ(cli::exit_code(IterationLimit("x", {})), cli::non_convergence);
    EXPECT_EQ(cli::exit_code(NoStableSolution("x")), cli::unstable);
    EXPECT_EQ(cli::exit_code(std::runtime_error("x")), cli::io_error);
}

TEST(RunConfig, ReferenceColumnsOnlyWhereMeaningful) {
    std::istringstream in("1e-6, -1e-7\n2e-6, -2e-7\n");
    cli::RunContext ctx;
    ctx.reference = parse_reference(in, 1.0, 1.0);
    const auto out = cli::run("eos", load_config("eos"), ctx);
    ASSERT_TRUE(out.reference_csv);
    EXPECT_EQ(out.reference_csv->substr(0, out.reference_csv->find('\n')),
              "n[a11^-3],E_per_N[hbar^2/(m*a11^2)]_ref,E_per_N[hbar^2/(m*a11^2)]_model");
    EXPECT_THROW(cli::run("stability", load_config("stability"), ctx), ValidationError);
}

TEST(RunConfig, UnstableRowsAreMarked) {
    auto cfg = load_config("gprime");
    const auto out = cli::run("gprime", cfg);
    EXPECT_GT(out.meta["unstable_rows"].get<std::size_t>(), 0u);
    EXPECT_NE(out.csv.find(",0.00000000000e+00,nan,"), std::string::npos);
}

// ------------------------------------------------------------ executable

TEST(Executable, MalformedJsonWritesNothing) {
    const auto dir = scratch_dir("malformed");
    spit(dir / "bad.json", "{ \"params\": { \"a11_bohr\": 60, }");
    const auto out = dir / "out.csv";
    EXPECT_EQ(run_cli("eos --config " + (dir / "bad.json").string() + " --out " + out.string()), 2);
    EXPECT_FALSE(fs::exists(out));
    EXPECT_FALSE(fs::exists(dir / "out.meta.json"));
    fs::remove_all(dir);
}

TEST(Executable, UsageErrors) {
    EXPECT_EQ(run_cli(""), 2);
    EXPECT_EQ(run_cli("eos"), 2);
    EXPECT_EQ(run_cli("eos --config /nonexistent.json"), 2);
    EXPECT_EQ(run_cli("eos --bogus"), 2);
    EXPECT_EQ(run_cli("--help >/dev/null"), 0);
}

TEST(Executable, WritesCsvAndSidecar) {
    const auto dir = scratch_dir("sidecar");
    const auto out = dir / "curve.csv";
    ASSERT_EQ(run_cli("eos --config " + std::string(DROPLET_DFT_CONFIGS) + "/eos.json --out " + out.string()), 0);
    EXPECT_EQ(slurp(out), cli::run("eos", load_config("eos")).csv);
    const auto meta = json::parse(slurp(dir / "curve.meta.json"));
    EXPECT_EQ(meta["command"], "eos");
    EXPECT_EQ(meta["output"], "curve.csv");
    fs::remove_all(dir);
}

TEST(Executable, ReferenceOverlay) {
    const auto dir = scratch_dir("overlay");
    spit(dir / "ref.dat", "# n E\n1 -1\n2 -1.5\n4 -1.2\n");
    const auto out = dir / "eos.csv";
    ASSERT_EQ(run_cli("eos --config " + std::string(DROPLET_DFT_CONFIGS) + "/eos.json --out " + out.string() +
                      " --ref " + (dir / "ref.dat").string() + " --ref-xscale 1e-6 --ref-yscale 1e-8"),
              0);
    const auto ref = slurp(dir / "eos_ref.csv");
    EXPECT_EQ(std::count(ref.begin(), ref.end(), '\n'), 4);
    EXPECT_NE(ref.find("\n1.00000000000e-06,-1.00000000000e-08,"), std::string::npos);
    spit(dir / "bad.dat", "2 1\n1 1\n");
    fs::remove(out);
    EXPECT_EQ(run_cli("eos --config " + std::string(DROPLET_DFT_CONFIGS) + "/eos.json --out " + out.string() +
                      " --ref " + (dir / "bad.dat").string()),
              2);
    EXPECT_FALSE(fs::exists(out));
    fs::remove_all(dir);
}

TEST(Executable, NonConvergenceExitCode) {
    const auto dir = scratch_dir("nonconv");
    auto cfg = load_config("selfconsistent");
    cfg["params"]["max_iter"] = 1;
    spit(dir / "sc.json", cfg.dump());
    EXPECT_EQ(run_cli("selfconsistent --config " + (dir / "sc.json").string() + " --out " + (dir / "o.csv").string()), 3);
    EXPECT_FALSE(fs::exists(dir / "o.csv"));
    fs::remove_all(dir);
}

TEST(Executable, UnstableExitCode) {
    const auto dir = scratch_dir("unstable");
    auto cfg = load_config("spectrum");
    cfg["params"]["density"]["value"] = 1e-6;
    spit(dir / "sp.json", cfg.dump());
    EXPECT_EQ(run_cli("spectrum --config " + (dir / "sp.json").string() + " --out " + (dir / "o.csv").string()), 4);
    cfg["params"]["mode"] = "bogoliubov";
    spit(dir / "sp.json", cfg.dump());
    EXPECT_EQ(run_cli("spectrum --config " + (dir / "sp.json").string() + " --out " + (dir / "o.csv").string()), 0);
    fs::remove_all(dir);
}

TEST(Executable, OutputIndependentOfThreadCount) {
    const auto dir = scratch_dir("threads");
    for (const char* command : {"stability", "depletion", "selfconsistent"}) {
        const std::string cfg = std::string(DROPLET_DFT_CONFIGS) + "/" + command + ".json";
        const auto a = dir / (std::string(command) + "_1.csv");
        const auto b = dir / (std::string(command) + "_4.csv");
        ASSERT_EQ(run_cli(std::string(command) + " --config " + cfg + " --out " + a.string(), "DROPLET_DFT_THREADS=1"), 0);
        ASSERT_EQ(run_cli(std::string(command) + " --config " + cfg + " --out " + b.string(), "DROPLET_DFT_THREADS=4"), 0);
        EXPECT_EQ(slurp(a), slurp(b)) << command;
    }
    fs::remove_all(dir);
}
