#include "geb/beam.hpp"

#include <cstdio>

namespace geb {

namespace {

template <typename M>
void write_block(std::ostream& os, const char* name, const Eigen::MatrixBase<M>& a, const char* rowTag)
{
    char buf[40];
    os << "# " << name << '\n' << rowTag;
    for (int c = 0; c < a.cols(); ++c)
        os << ",c" << c + 1;
    os << '\n';
    for (int r = 0; r < a.rows(); ++r) {
        os << rowTag << r + 1;
        for (int c = 0; c < a.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(a(r, c)));
            os << ',' << buf;
        }
        os << '\n';
    }
}

} // namespace

void write_matrices_csv(std::ostream& os, const BeamMatricesd& m)
{
    write_block(os, "J", m.J, "r");
    write_block(os, "S1", m.S1, "r");
    write_block(os, "S2", m.S2, "r");
    write_block(os, "M", m.M, "r");
    write_block(os, "C", m.C, "r");
    write_block(os, "D", m.D, "r");
    write_block(os, "bigD", m.bigD, "r");
    write_block(os, "L", m.L, "r");
    write_block(os, "Linv", m.Linv, "r");
    write_block(os, "A", m.A, "r");
    write_block(os, "QP", m.QP, "r");
    write_block(os, "QD", m.QD, "r");
    write_block(os, "kappa", m.kappa, "r");
    write_block(os, "Lambda", m.Lambda, "r");
    write_block(os, "lambda", m.lambda.transpose(), "r");
    write_block(os, "mu", m.mu.transpose(), "r");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", m.Ckappa);
    os << "# Ckappa\n" << buf << '\n';
}

} // namespace geb
