#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sdkrylov/bench.hpp"
#include "sdkrylov/io.hpp"
#include "sdkrylov/problems.hpp"
#include "sdkrylov/random.hpp"

using namespace sdkrylov;
using Catch::Approx;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("sdkrylov_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("matrix market round trip") {
    SECTION("values survive bitwise, structure intact") {
        SplitMix64 rng(8);
        std::vector<Triplet> ts;
        for (index_t i = 0; i < 12; ++i)
            for (index_t j = 0; j < 12; ++j)
                if (rng.next_unit() < 0.3)
                    ts.push_back({i, j, (rng.next_symmetric() * 2.0 - 1.0) *
                                            std::pow(10.0, 30.0 * rng.next_symmetric())});
        ts.push_back({0, 0, 1e16});
        ts.push_back({11, 11, -3.0000000000000004e-17});
        const auto m = SparseMatrix::from_triplets(12, 12, std::move(ts));
        const auto path = temp_file("roundtrip.mtx");
        write_matrix_market(m, path.string());
        const auto back = read_matrix_market(path.string());
        REQUIRE(back.n_rows() == m.n_rows());
        REQUIRE(back.row_offsets() == m.row_offsets());
        REQUIRE(back.col_indices() == m.col_indices());
        REQUIRE(back.values() == m.values());
        std::filesystem::remove(path);
    }
    SECTION("symmetric storage is mirrored on read") {
        const auto path = temp_file("sym.mtx");
        {
            std::ofstream out(path);
            out << "%%MatrixMarket matrix coordinate real symmetric\n";
            out << "% comment line\n";
            out << "2 2 2\n1 1 2.5\n2 1 -1.25\n";
        }
        const auto m = read_matrix_market(path.string());
        REQUIRE(m.at(0, 0) == 2.5);
        REQUIRE(m.at(0, 1) == -1.25);
        REQUIRE(m.at(1, 0) == -1.25);
        std::filesystem::remove(path);
    }
    SECTION("vector round trip") {
        const DenseVector v{1.0, -2.5e-300, 3.333333333333333e0, 1e16};
        const auto path = temp_file("vec.rhs");
        write_vector(v, path.string());
        REQUIRE(read_vector(path.string()) == v);
        std::filesystem::remove(path);
    }
    SECTION("missing and malformed files raise IoError") {
        REQUIRE_THROWS_AS(read_matrix_market("/nonexistent/file.mtx"), IoError);
        const auto path = temp_file("garbage.mtx");
        {
            std::ofstream out(path);
            out << "not a matrix market file\n";
        }
        REQUIRE_THROWS_AS(read_matrix_market(path.string()), IoError);
        std::filesystem::remove(path);
    }
}

TEST_CASE("benchmark table plans") {
    SECTION("T2 layout and full within-tolerance reproduction") {
        const auto plan = bench::build_plan(bench::TableId::T2);
        REQUIRE(plan.cases.size() == 66);  // 11 methods x 6 epsilon columns
        const auto rows = bench::run_plan(plan, 1);
        for (const auto& row : rows) {
            INFO(row.row_label << " " << row.col_label << ": " << row.iterations << " vs "
                               << row.reference_value);
            REQUIRE(row.within_tolerance == "yes");
        }
    }
    SECTION("plan output files are deterministic across runs and thread counts") {
        const auto plan = bench::build_plan(bench::TableId::T2);
        const auto rows1 = bench::run_plan(plan, 1);
        const auto rows2 = bench::run_plan(plan, 2);
        const auto p1 = temp_file("t2a.csv"), p2 = temp_file("t2b.csv");
        bench::write_csv(rows1, p1.string());
        bench::write_csv(rows2, p2.string());
        REQUIRE(slurp(p1) == slurp(p2));
        std::filesystem::remove(p1);
        std::filesystem::remove(p2);
    }
    SECTION("markdown mirrors the published grid") {
        const auto plan = bench::build_plan(bench::TableId::T2);
        const auto rows = bench::run_plan(plan, 1);
        const auto path = temp_file("t2.md");
        bench::write_markdown(plan, rows, path.string());
        const std::string md = slurp(path);
        REQUIRE(md.find("| ESD-CGN |") != std::string::npos);
        REQUIRE(md.find("eps=1e-16") != std::string::npos);
        std::filesystem::remove(path);
    }
    SECTION("reference cell matching rules") {
        using bench::ReferenceCell;
        const auto exact = ReferenceCell::exact(100.0, 3.0, 0.0);
        REQUIRE(exact.matches(102.0, SolveStatus::Converged));
        REQUIRE_FALSE(exact.matches(104.0, SolveStatus::Converged));
        REQUIRE_FALSE(exact.matches(100.0, SolveStatus::MaxIterations));
        const auto censored = ReferenceCell::more_than(1000.0);
        REQUIRE(censored.matches(1000.0, SolveStatus::MaxIterations));
        REQUIRE(censored.matches(1200.0, SolveStatus::Converged));
        REQUIRE_FALSE(censored.matches(900.0, SolveStatus::Converged));
        REQUIRE(ReferenceCell::breaks_down().matches(3.0, SolveStatus::Breakdown));
    }
    SECTION("overrides flow into the cases") {
        bench::PlanOverrides ov;
        ov.max_iterations = 5;
        const auto plan = bench::build_plan(bench::TableId::T2, ov);
        const auto rows = bench::run_plan(plan, 1);
        // with a 5-iteration cap the slow baselines cannot converge
        bool saw_cap = false;
        for (const auto& row : rows)
            if (row.status == "MaxIterations" && row.iterations == 5.0) saw_cap = true;
        REQUIRE(saw_cap);
    }
}
