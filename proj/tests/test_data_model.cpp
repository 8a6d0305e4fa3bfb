#include <cstdio>
#include <fstream>

#include "clsiv/csv_io.hpp"
#include "clsiv/data_model.hpp"
#include "clsiv/rng.hpp"
#include "clsiv/simulation.hpp"
#include "doctest.h"

using namespace clsiv;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t key) {
    RngStream s(key);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = s.normal();
    }
    return m;
}

std::string temp_path(const char* name) {
    return std::string("clsiv_test_") + name + ".csv";
}

}  // namespace

TEST_CASE("Dataset invariants") {
    const Vector y = random_matrix(6, 1, 1).col(0);
    CHECK_NOTHROW(Dataset(y, random_matrix(6, 2, 2), random_matrix(6, 3, 3)));
    // l < k violates the order condition.
    CHECK_THROWS_AS(Dataset(y, random_matrix(6, 3, 2), random_matrix(6, 2, 3)), validation_error);
    // n must exceed l.
    CHECK_THROWS_AS(Dataset(y, random_matrix(6, 2, 2), random_matrix(6, 6, 3)), validation_error);
    // Non-finite entries rejected.
    Matrix bad = random_matrix(6, 2, 4);
    bad(3, 1) = std::nan("");
    CHECK_THROWS_AS(Dataset(y, bad, random_matrix(6, 3, 5)), validation_error);
}

TEST_CASE("assemble: dimension bookkeeping") {
    PartitionedDataset p;
    p.y = random_matrix(3, 1, 10).col(0);
    p.X1 = random_matrix(3, 1, 11);
    p.X2 = random_matrix(3, 2, 12);  // but Dataset needs n > k; keep n big enough below
    p.Z1 = random_matrix(3, 2, 13);

    // With n = 3 and k = 3 the Dataset invariant rejects; grow the row count.
    PartitionedDataset q;
    q.y = random_matrix(8, 1, 14).col(0);
    q.X1 = random_matrix(8, 1, 15);
    q.X2 = random_matrix(8, 2, 16);
    q.Z1 = random_matrix(8, 2, 17);
    const Dataset d = assemble(q);
    CHECK(d.k() == 3);
    CHECK(d.l() == 4);
    CHECK_THROWS_AS(assemble(p), validation_error);
}

TEST_CASE("assemble: degenerate partition reproduces the raw inputs") {
    PartitionedDataset p;
    p.y = random_matrix(9, 1, 20).col(0);
    p.X1 = random_matrix(9, 1, 21);
    p.X2 = Matrix(9, 0);
    p.Z1 = random_matrix(9, 2, 22);
    const Dataset d = assemble(p);
    CHECK(d.X == p.X1);
    CHECK(d.Z == p.Z1);
    CHECK(d.y == p.y);
}

TEST_CASE("assemble: census-style block shapes") {
    const Index n = 60;
    PartitionedDataset p;
    p.y = random_matrix(n, 1, 30).col(0);
    p.X1 = random_matrix(n, 1, 31);   // education
    p.X2 = random_matrix(n, 9, 32);   // year dummies
    p.Z1 = random_matrix(n, 40, 33);  // quarter x year dummies
    const Dataset d = assemble(p);
    CHECK(d.k() == 10);
    CHECK(d.l() == 49);
}

TEST_CASE("assemble: column identity and the l - k gap") {
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        const Index n = 20;
        const Index k1 = 1 + static_cast<Index>(trial % 2);
        const Index k2 = static_cast<Index>(trial % 3);
        const Index l1 = k1 + static_cast<Index>(trial % 4);
        PartitionedDataset p;
        p.y = random_matrix(n, 1, substream(40, trial)).col(0);
        p.X1 = random_matrix(n, k1, substream(41, trial));
        p.X2 = random_matrix(n, k2, substream(42, trial));
        p.Z1 = random_matrix(n, l1, substream(43, trial));
        p.intercept = trial % 2 == 0;
        const Dataset d = assemble(p);

        // Columns are copied, never transformed.
        for (Index j = 0; j < k1; ++j) CHECK(d.X.col(j) == p.X1.col(j));
        for (Index j = 0; j < k2; ++j) CHECK(d.X.col(k1 + j) == p.X2.col(j));
        for (Index j = 0; j < l1; ++j) CHECK(d.Z.col(j) == p.Z1.col(j));
        if (p.intercept) CHECK(d.X.col(d.k() - 1) == Vector::Ones(n));

        CHECK(d.l() - d.k() == l1 - k1);
    }
}

TEST_CASE("load_csv: small parse round trip") {
    const std::string path = temp_path("parse");
    {
        std::ofstream out(path);
        out << "wage,educ,qob,extra\n";
        out << "1.5,12,1,0\n2.5,16,2,0\n0.5,10,3,0\n1.25,11,4,0\n2.0,14,1,0\n";
    }
    ColumnSpec spec;
    spec.response = "wage";
    spec.endogenous = {"educ"};
    spec.instruments = {"qob"};
    const PartitionedDataset p = load_csv(path, spec);
    CHECK(p.n() == 5);
    CHECK(p.k1() == 1);
    CHECK(p.l1() == 1);
    CHECK(p.y(0) == 1.5);
    CHECK(p.X1(1, 0) == 16.0);
    CHECK(p.Z1(4, 0) == 1.0);
    std::remove(path.c_str());
}

TEST_CASE("load_csv: scientific notation is accepted") {
    const std::string path = temp_path("scinot");
    {
        std::ofstream out(path);
        out << "y,x,z\n1e-3,2.5E+02,-3.25e0\n0.5,1,2\n7,8,9\n1,2,3\n";
    }
    ColumnSpec spec;
    spec.response = "y";
    spec.endogenous = {"x"};
    spec.instruments = {"z"};
    const PartitionedDataset p = load_csv(path, spec);
    CHECK(p.y(0) == 1e-3);
    CHECK(p.X1(0, 0) == 250.0);
    CHECK(p.Z1(0, 0) == -3.25);
    std::remove(path.c_str());
}

TEST_CASE("load_csv: unparseable cells name the rows") {
    const std::string path = temp_path("badcell");
    {
        std::ofstream out(path);
        out << "y,x,z\n1,2,3\n1,NA,3\n4,5,6\n7,8,oops\n";
    }
    ColumnSpec spec;
    spec.response = "y";
    spec.endogenous = {"x"};
    spec.instruments = {"z"};
    try {
        load_csv(path, spec);
        FAIL("expected csv_error");
    } catch (const csv_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("3") != std::string::npos);  // line 3 holds the NA
        CHECK(msg.find("5") != std::string::npos);  // line 5 holds "oops"
    }
    std::remove(path.c_str());
}

TEST_CASE("load_csv: missing columns and short files") {
    const std::string path = temp_path("missing");
    {
        std::ofstream out(path);
        out << "y,x\n1,2\n3,4\n5,6\n";
    }
    ColumnSpec spec;
    spec.response = "y";
    spec.endogenous = {"x"};
    spec.instruments = {"z"};
    CHECK_THROWS_AS(load_csv(path, spec), csv_error);
    std::remove(path.c_str());
}

TEST_CASE("write then load reproduces the matrices bit for bit") {
    ScenarioSpec spec;
    spec.model = Model::I;
    spec.alpha = 0.25;
    spec.gamma = 0.5;
    spec.n = 40;
    spec.seed = 77;
    RngStream stream(substream(spec.seed, 0));
    const Dataset d = draw_model_i(spec, stream);

    PartitionedDataset p;
    p.y = d.y;
    p.X1 = d.X;
    p.X2 = Matrix(d.n(), 0);
    p.Z1 = d.Z;

    ColumnSpec cols;
    cols.response = "y";
    cols.endogenous = {"x1"};
    cols.instruments = {"z1"};

    const std::string path = temp_path("roundtrip");
    write_dataset_csv(path, p, cols);
    const PartitionedDataset back = load_csv(path, cols);
    CHECK(back.y == p.y);
    CHECK(back.X1 == p.X1);
    CHECK(back.Z1 == p.Z1);
    std::remove(path.c_str());
}
