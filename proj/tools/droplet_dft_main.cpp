// droplet-dft <command> --config <file> [--out <path>] [--ref <path> --ref-xscale <v> --ref-yscale <v>]

#include <boost/program_options.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "droplet_dft/cli.hpp"

namespace fs = std::filesystem;
namespace po = boost::program_options;
using namespace droplet_dft;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
    fs::path p = out;
    p.replace_filename(out.stem().string() + suffix);
    return p;
}

int run(int argc, char** argv) {
    std::string command, config_path, out_path, ref_path;
    double ref_x = 1.0, ref_y = 1.0;

    po::options_description opts("Options");
    opts.add_options()
        ("help,h", "show this message")
        ("config", po::value(&config_path), "JSON run configuration")
        ("out", po::value(&out_path), "output CSV (default: config output_path or <command>.csv)")
        ("ref", po::value(&ref_path), "reference dataset, two columns")
        ("ref-xscale", po::value(&ref_x), "multiplier taking reference x into internal units")
        ("ref-yscale", po::value(&ref_y), "multiplier taking reference y into internal units");
    po::options_description all;
    all.add(opts).add_options()("command", po::value(&command));
    po::positional_options_description pos;
    pos.add("command", 1);

    po::variables_map vm;
    try {
        po::store(po::command_line_parser(argc, argv).options(all).positional(pos).run(), vm);
        po::notify(vm);
    } catch (const po::error& e) {
        std::cerr << "droplet-dft: " << e.what() << '\n';
        return cli::validation;
    }
    if (vm.count("help") || command.empty()) {
        std::cout << "usage: droplet-dft <command> --config <file> [--out <path>] "
                     "[--ref <path> --ref-xscale <v> --ref-yscale <v>]\ncommands:";
        for (const auto& c : cli::commands()) std::cout << ' ' << c;
        std::cout << '\n' << opts;
        return vm.count("help") ? cli::ok : cli::validation;
    }

    try {
        if (config_path.empty()) throw ValidationError("--config is required");
        std::ifstream in(config_path);
        if (!in) throw ValidationError("cannot open config '" + config_path + "'");
        const auto config = cli::json::parse(in);
        if (!config.is_object()) throw ValidationError("configuration must be a JSON object");

        cli::RunContext ctx;
        ctx.constants = load_constants(DROPLET_DFT_CONSTANTS_FILE);
        ctx.threads = default_thread_count();

        if (ref_path.empty() && config.contains("reference_data_path")) {
            if (!config["reference_data_path"].is_string())
                throw ValidationError("'reference_data_path' must be a string");
            ref_path = config["reference_data_path"].get<std::string>();
            auto scale = [&](const char* key, double& v) {
                if (!config.contains(key)) return;
                if (!config[key].is_number()) throw ValidationError(std::string("'") + key + "' must be a number");
                v = config[key].get<double>();
            };
            if (!vm.count("ref-xscale")) scale("reference_x_scale", ref_x);
            if (!vm.count("ref-yscale")) scale("reference_y_scale", ref_y);
        }
        if (!ref_path.empty()) ctx.reference = ingest_reference(ref_path, ref_x, ref_y);

        if (out_path.empty()) {
            if (config.contains("output_path")) {
                if (!config["output_path"].is_string()) throw ValidationError("'output_path' must be a string");
                out_path = config["output_path"].get<std::string>();
            } else {
                out_path = command + ".csv";
            }
        }

        auto result = cli::run(command, config, ctx);
        const fs::path out(out_path);
        write_file(out, result.csv);
        result.meta["output"] = out.filename().string();
        if (result.reference_csv) {
            const auto ref_out = sibling(out, "_ref.csv");
            write_file(ref_out, *result.reference_csv);
            result.meta["reference_output"] = ref_out.filename().string();
            result.meta["reference_rows"] = ctx.reference->size();
        }
        write_file(sibling(out, ".meta.json"), result.meta.dump(2) + "\n");
        return cli::ok;
    } catch (const IterationLimit& e) {
        std::cerr << "droplet-dft: " << e.what() << " (last residual " << csv::format_number(e.last_residual())
                  << ")\n";
        return cli::non_convergence;
    } catch (const std::exception& e) {
        std::cerr << "droplet-dft: " << e.what() << '\n';
        return cli::exit_code(e);
    }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
