// Runs the acceptance criteria and prints one PASS/FAIL line each.
#include <CLI11.hpp>
#include <iostream>

#include "acceptance.hpp"

int main(int argc, char** argv) {
    CLI::App app{"krein acceptance suite"};
    std::string fixtures, write_dir, suite = "all";
    app.add_option("--fixtures", fixtures, "directory with fixture CSVs (generated in memory if omitted)");
    app.add_option("--suite", suite, "core | identities | bridges | all");
    app.add_option("--write-fixtures", write_dir, "write the generated fixtures to a directory and exit");
    CLI11_PARSE(app, argc, argv);

    using namespace krein::acceptance;
    try {
        if (!write_dir.empty()) {
            Fixtures::generate().save(write_dir);
            return 0;
        }
        const Suite s = parse_suite(suite);
        const Fixtures f = fixtures.empty() ? Fixtures::generate() : Fixtures::load(fixtures);
        int failed = 0;
        for (const auto& o : run(f, s)) {
            std::cout << format_line(o) << std::endl;
            failed += !o.pass;
        }
        return failed ? 3 : 0;
    } catch (const krein::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == krein::ErrorKind::usage ? 1 : 2;
    }
}
