#include "swapforge/curation/pose.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "swapforge/errors.hpp"

namespace swapforge::curation {

namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

Eigen::Matrix3d rotation_from_pose(const Pose& p) {
    const double y = p.yaw / kRadToDeg, x = p.pitch / kRadToDeg, z = p.roll / kRadToDeg;
    Eigen::Matrix3d ry, rx, rz;
    ry << std::cos(y), 0, std::sin(y), 0, 1, 0, -std::sin(y), 0, std::cos(y);
    rx << 1, 0, 0, 0, std::cos(x), -std::sin(x), 0, std::sin(x), std::cos(x);
    rz << std::cos(z), -std::sin(z), 0, std::sin(z), std::cos(z), 0, 0, 0, 1;
    return ry * rx * rz;
}

double wrap_degrees(double d) {
    double r = std::remainder(d, 360.0);
    if (r <= -180.0) r += 360.0;
    return r;
}

}  // namespace

Pose estimate_pose(const imaging::Landmarks68& lm, const alignment::Template3d& tmpl) {
    if (!imaging::landmarks_finite(lm)) throw InvalidArgument("estimate_pose: non-finite landmarks");
    const int n = static_cast<int>(lm.size());
    Eigen::MatrixXd P(n, 3), Q(n, 2);
    for (int i = 0; i < n; ++i) {
        P.row(i) << tmpl[i].x, tmpl[i].y, tmpl[i].z;
        Q.row(i) << lm[i].x, lm[i].y;
    }
    P.rowwise() -= P.colwise().mean();
    Q.rowwise() -= Q.colwise().mean();

    const Eigen::Matrix2d qcov = Q.transpose() * Q;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(qcov);
    const double lmax = eig.eigenvalues()(1);
    if (!(lmax > 0.0) || eig.eigenvalues()(0) <= 1e-9 * lmax) {
        throw NumericalDegeneracy("estimate_pose: landmarks are collinear");
    }

    // Affine camera M (2x3) minimising |Q - P M^T|^2, then its nearest
    // scaled orthonormal row pair.
    const Eigen::Matrix<double, 3, 2> Mt = (P.transpose() * P).ldlt().solve(P.transpose() * Q);
    const Eigen::Matrix<double, 2, 3> M = Mt.transpose();
    Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix<double, 2, 3> rows = svd.matrixU() * svd.matrixV().leftCols<2>().transpose();

    Eigen::Matrix3d R;
    R.row(0) = rows.row(0);
    R.row(1) = rows.row(1);
    R.row(2) = rows.row(0).cross(rows.row(1));

    Pose pose;
    pose.pitch = wrap_degrees(std::asin(std::clamp(-R(1, 2), -1.0, 1.0)) * kRadToDeg);
    pose.yaw = wrap_degrees(std::atan2(R(0, 2), R(2, 2)) * kRadToDeg);
    pose.roll = wrap_degrees(std::atan2(R(1, 0), R(1, 1)) * kRadToDeg);
    return pose;
}

Pose estimate_pose(const imaging::Landmarks68& lm) {
    return estimate_pose(lm, alignment::face_template_3d());
}

imaging::Landmarks68 project_template(const alignment::Template3d& tmpl, const Pose& pose, double scale,
                                      imaging::Point2 offset) {
    const Eigen::Matrix3d R = rotation_from_pose(pose);
    imaging::Landmarks68 out;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        const Eigen::Vector3d p = R * Eigen::Vector3d(tmpl[i].x, tmpl[i].y, tmpl[i].z);
        out[i] = {scale * p.x() + offset.x, scale * p.y() + offset.y};
    }
    return out;
}

}  // namespace swapforge::curation
