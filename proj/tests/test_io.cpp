#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fermitree/io.hpp"
#include "fermitree/random_inputs.hpp"

using namespace fermitree;
using fermitree::testing::split_rng;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("fermitree_io_" + std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("covariance json roundtrip") {
    TempDir dir;
    auto rng = split_rng(3100, 0);
    Lattice torus({4, 2});
    auto cov = testing::random_covariance(torus, 2, rng);
    io::save_covariance(cov, dir.file("cov.json"));
    auto back = io::load_covariance(dir.file("cov.json"));
    CHECK(back.spins() == 2);
    CHECK(back.torus().dims == std::vector<int>{4, 2});
    double d = 0.0;
    for (std::size_t i = 0; i < back.hat_table().size(); ++i)
        d = std::max(d, std::abs(back.hat_table()[i] - cov.hat_table()[i]));
    CHECK(d < 1e-12);
}

TEST_CASE("kernel json roundtrip") {
    TempDir dir;
    auto rng = split_rng(3200, 0);
    Lattice torus({4});
    auto k = testing::random_kernel(torus, 2, 2, rng);
    io::save_kernel(k, dir.file("w2.json"));
    auto back = io::load_kernel(dir.file("w2.json"));
    CHECK(back.arity() == 2);
    double d = 0.0;
    for (std::size_t i = 0; i < back.hat().values.size(); ++i)
        d = std::max(d, std::abs(back.hat().values[i] - k.hat().values[i]));
    CHECK(d < 1e-12);
}

TEST_CASE("tree json roundtrip and id") {
    TempDir dir;
    trees::Tree t(4, {{2, 4}, {1, 2}, {2, 3}});
    CHECK(io::tree_id(t) == "1-2,2-3,2-4");  // sorted edge list
    io::save_tree(t, dir.file("t.json"));
    auto back = io::load_tree(dir.file("t.json"));
    CHECK(back == t);
}

TEST_CASE("problem bundle load") {
    TempDir dir;
    auto rng = split_rng(3300, 0);
    Lattice torus({4});
    auto cov = testing::random_covariance(torus, 2, rng);
    auto k2 = testing::random_kernel(torus, 2, 2, rng);
    auto k4 = testing::random_kernel(torus, 2, 4, rng);
    io::save_covariance(cov, dir.file("cov.json"));
    io::save_kernel(k2, dir.file("w2.json"));
    io::save_kernel(k4, dir.file("w4.json"));

    std::ofstream spec(dir.file("problem.json"));
    spec << R"({
      "tree": {"m": 2, "edges": [[1, 2]]},
      "root": 1,
      "n_per_vertex": [4, 2],
      "external_legs": [[0, 0], [1, 1], [2, 0], [1, 0]],
      "covariance_ref": "cov.json",
      "kernels_ref": {"2": "w2.json", "4": "w4.json"}
    })";
    spec.close();

    auto bundle = io::load_problem(dir.file("problem.json"));
    REQUIRE(bundle.problem != nullptr);
    CHECK(bundle.problem->layout.total() == 4);
    CHECK(bundle.problem->rt.root == 1);
    CHECK(bundle.problem->external[1].p_flat == 1);
    CHECK(bundle.problem->external[1].sigma == 1);

    // the loaded problem is usable end to end
    Complex lhs = amplitude::kernel_hat_A(*bundle.problem);
    Complex rhs = amplitude::kernel_antisymmetrization_oracle(*bundle.problem);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
}

TEST_CASE("bound report serialization") {
    bounds::BoundReport row;
    row.tree_id = "1-2";
    row.n_per_vertex = {0, 4, 4};
    row.external_legs = 6;
    row.perturbative = 1.5;
    row.standard = 2.5;
    row.theorem1 = 3.5;
    row.loop = 4.5;
    row.amplitude_abs = 0.25;
    row.bound_only = false;

    auto j = io::bound_report_json(row);
    CHECK(j.find("\"tree\":\"1-2\"") != std::string::npos);
    CHECK(j.find("\"loop\":4.5") != std::string::npos);

    auto csv = io::bound_report_csv(row);
    CHECK(csv.find("\"1-2\"") != std::string::npos);
    CHECK(io::bound_report_csv_header().substr(0, 4) == "tree");
}

TEST_CASE("append_lines is append-only") {
    TempDir dir;
    io::append_lines(dir.file("log.jsonl"), {"{\"a\":1}"});
    io::append_lines(dir.file("log.jsonl"), {"{\"b\":2}"});
    std::ifstream in(dir.file("log.jsonl"));
    std::string l1, l2;
    std::getline(in, l1);
    std::getline(in, l2);
    CHECK(l1 == "{\"a\":1}");
    CHECK(l2 == "{\"b\":2}");
}
