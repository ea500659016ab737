#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "frameql/datagen.h"
#include "frameql/error.h"

int main(int argc, char** argv) {
    CLI::App app{"Generate a Wisconsin benchmark table as JSON lines"};
    frameql::datagen::GeneratorSpec spec;
    std::string attrs = "tenPercent";
    std::string out_path;
    app.add_option("--max", spec.max, "Number of rows (MAX)")->check(CLI::PositiveNumber);
    app.add_option("--seed", spec.seed, "Random seed");
    app.add_option("--missing-rate", spec.missing_rate, "Fraction of rows losing each listed attribute")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--missing-attrs", attrs, "Comma-separated attributes to thin out");
    app.add_option("--out", out_path, "Output file (default: stdout)");
    CLI11_PARSE(app, argc, argv);

    spec.missing_attrs.clear();
    std::stringstream ss(attrs);
    for (std::string a; std::getline(ss, a, ',');) {
        if (!a.empty()) spec.missing_attrs.push_back(a);
    }
    try {
        if (out_path.empty()) {
            frameql::datagen::write_jsonl(spec, std::cout);
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw frameql::Error("cannot open '" + out_path + "' for writing");
            frameql::datagen::write_jsonl(spec, out);
        }
    } catch (const std::exception& e) {
        std::cerr << "datagen: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
