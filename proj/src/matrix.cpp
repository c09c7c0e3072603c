#include "medtext/matrix.hpp"

#include <cmath>

#include "medtext/error.hpp"

namespace medtext {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::ShapeMismatch, what);
}

} // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), "matmul: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double av = arow[k];
            if (av == 0.0) continue;
            const double* brow = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                orow[j] += av * brow[j];
            }
        }
    }
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows(), "matmul_tn: row counts differ");
    Matrix out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* arow = a.row(k);
        const double* brow = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double av = arow[i];
            if (av == 0.0) continue;
            double* orow = out.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                orow[j] += av * brow[j];
            }
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.cols(), "matmul_nt: column counts differ");
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc += arow[k] * brow[k];
            }
            orow[j] = acc;
        }
    }
    return out;
}

void add_inplace(Matrix& a, const Matrix& b) {
    require(a.same_shape(b), "add_inplace: shapes differ");
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        a.data()[i] += b.data()[i];
    }
}

void scale_inplace(Matrix& a, double factor) {
    for (double& v : a.data()) v *= factor;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require(a.same_shape(b), "max_abs_diff: shapes differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        worst = std::max(worst, std::fabs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

} // namespace medtext
