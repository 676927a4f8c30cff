// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lunagen/resection.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "lunagen/error.hpp"

namespace lunagen {

namespace {

Mat3d skew(const Vec3d& v) {
  Mat3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Quatd exp_quaternion(const Vec3d& theta) {
  double angle = theta.norm();
  if (angle < 1e-12) return Quatd(1.0, 0.5 * theta.x(), 0.5 * theta.y(), 0.5 * theta.z()).normalized();
  Vec3d axis = theta / angle;
  return Quatd(Eigen::AngleAxisd(angle, axis));
}

bool landmarks_well_conditioned(const std::vector<Vec3d>& points) {
  if (points.size() < 3) return false;
  Vec3d mean = Vec3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Mat3d cov = Mat3d::Zero();
  for (const auto& p : points) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3d> eig(cov);
  // Eigenvalues ascending; collinear sets have rank <= 1.
  double largest = eig.eigenvalues()(2);
  double second = eig.eigenvalues()(1);
  return largest > 0.0 && second > 1e-10 * largest;
}

double cost_of(const Eigen::VectorXd& r) { return 0.5 * r.squaredNorm(); }

}  // namespace

Eigen::VectorXd los_residuals(const FrameObservations& obs, const Pose& pose) {
  const Mat3d r_cw = pose.attitude.conjugate().toRotationMatrix();
  Eigen::VectorXd r(3 * static_cast<Eigen::Index>(obs.directions.size()));
  for (std::size_t i = 0; i < obs.directions.size(); ++i) {
    Vec3d u = r_cw * (obs.landmarks[i] - pose.position);
    r.segment<3>(3 * static_cast<Eigen::Index>(i)) = obs.directions[i] - u.normalized();
  }
  return r;
}

Eigen::MatrixXd los_jacobian(const FrameObservations& obs, const Pose& pose) {
  const Mat3d r_cw = pose.attitude.conjugate().toRotationMatrix();
  Eigen::MatrixXd j(3 * static_cast<Eigen::Index>(obs.directions.size()), 6);
  for (std::size_t i = 0; i < obs.directions.size(); ++i) {
    Vec3d u = r_cw * (obs.landmarks[i] - pose.position);
    double n = u.norm();
    Vec3d d = u / n;
    Mat3d proj = (Mat3d::Identity() - d * d.transpose()) / n;
    // r = d_obs - normalize(u); du/dp = -R_cw, du/dtheta = [u]x (camera-side
    // perturbation), dr/dx = -proj * du/dx.
    j.block<3, 3>(3 * static_cast<Eigen::Index>(i), 0) = proj * r_cw;
    j.block<3, 3>(3 * static_cast<Eigen::Index>(i), 3) = -proj * skew(u);
  }
  return j;
}

LosInversionResult invert_los(const std::vector<LosObservation>& observations,
                              const LandmarkSet& landmarks,
                              const std::vector<InitialFrame>& initial,
                              const LosSolveOptions& options) {
  require(!initial.empty(), Errc::invalid_argument, "invert_los: no frames to solve");

  // Bucket observations by frame.
  std::map<std::string, FrameObservations> by_frame;
  for (const auto& obs : observations) {
    require(std::abs(obs.direction.norm() - 1.0) <= 1e-9, Errc::invalid_argument,
            "invert_los: observation direction not unit norm");
    auto lm = landmarks.find(obs.landmark_id);
    require(lm != landmarks.end(), Errc::invalid_argument,
            "invert_los: unknown landmark '" + obs.landmark_id + "'");
    auto& bucket = by_frame[obs.frame_id];
    bucket.directions.push_back(obs.direction);
    bucket.landmarks.push_back(lm->second);
  }

  LosInversionResult result;
  for (const auto& frame : initial) {
    auto it = by_frame.find(frame.frame_id);
    if (it == by_frame.end() || !landmarks_well_conditioned(it->second.landmarks))
      fail(Errc::unobservable_frame,
           "invert_los: frame '" + frame.frame_id + "' needs >= 3 non-collinear landmarks");
    const FrameObservations& obs = it->second;

    Pose pose = frame.pose;
    Eigen::VectorXd r = los_residuals(obs, pose);
    double cost = cost_of(r);
    double lambda = 1e-6;
    bool converged = false;
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
      Eigen::MatrixXd j = los_jacobian(obs, pose);
      Eigen::Matrix<double, 6, 6> jtj = j.transpose() * j;
      Eigen::Matrix<double, 6, 1> jtr = j.transpose() * r;

      bool stepped = false;
      for (int attempt = 0; attempt < 32; ++attempt) {
        Eigen::Matrix<double, 6, 6> damped = jtj;
        damped.diagonal().array() += lambda;
        Eigen::Matrix<double, 6, 1> delta = damped.ldlt().solve(-jtr);
        Pose trial;
        trial.position = pose.position + delta.head<3>();
        trial.attitude = (pose.attitude * exp_quaternion(delta.tail<3>())).normalized();
        Eigen::VectorXd r_trial = los_residuals(obs, trial);
        double cost_trial = cost_of(r_trial);
        if (cost_trial < cost) {
          pose = trial;
          r = std::move(r_trial);
          cost = cost_trial;
          lambda = std::max(lambda / 3.0, 1e-12);
          stepped = true;
          if (delta.norm() < options.step_tolerance) converged = true;
          break;
        }
        lambda *= 10.0;
      }
      if (converged || !stepped) {
        // Refusing every damped step means we are at (numerical) optimality.
        if (!stepped) converged = true;
        break;
      }
    }

    double rms = std::sqrt(r.squaredNorm() / static_cast<double>(obs.directions.size()));
    result.report.push_back(
        FrameSolveReport{frame.frame_id, rms, iter + 1, converged, obs.directions.size()});
    result.trajectory.samples.push_back(TrajectorySample{frame.t, pose});
  }
  return result;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    fail(Errc::bad_format, "bad numeric field in " + context + ": '" + s + "'");
  return v;
}

}  // namespace

std::vector<LosObservation> load_los_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open observations file: " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::bad_format,
          "empty observations file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "frame_id,landmark_id,dx,dy,dz", Errc::bad_format,
          "observations header mismatch in " + path.string());

  std::vector<LosObservation> observations;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    require(fields.size() == 5, Errc::bad_format, "observations row needs 5 fields");
    LosObservation obs;
    obs.frame_id = fields[0];
    obs.landmark_id = fields[1];
    obs.direction = Vec3d(parse_double(fields[2], path.string()),
                          parse_double(fields[3], path.string()),
                          parse_double(fields[4], path.string()))
                        .normalized();
    observations.push_back(std::move(obs));
  }
  return observations;
}

void save_los_csv(const std::vector<LosObservation>& observations,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write observations file: " + path.string());
  out << "frame_id,landmark_id,dx,dy,dz\n";
  char buf[256];
  for (const auto& obs : observations) {
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%.17g\n", obs.direction.x(), obs.direction.y(),
                  obs.direction.z());
    out << obs.frame_id << ',' << obs.landmark_id << buf;
  }
}

LandmarkSet load_landmarks_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open landmarks file: " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::bad_format,
          "empty landmarks file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "landmark_id,x,y,z", Errc::bad_format,
          "landmarks header mismatch in " + path.string());

  LandmarkSet landmarks;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    require(fields.size() == 4, Errc::bad_format, "landmarks row needs 4 fields");
    landmarks[fields[0]] = Vec3d(parse_double(fields[1], path.string()),
                                 parse_double(fields[2], path.string()),
                                 parse_double(fields[3], path.string()));
  }
  return landmarks;
}

void save_landmarks_csv(const LandmarkSet& landmarks, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write landmarks file: " + path.string());
  out << "landmark_id,x,y,z\n";
  char buf[256];
  for (const auto& [id, p] : landmarks) {
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%.17g\n", p.x(), p.y(), p.z());
    out << id << buf;
  }
}

}  // namespace lunagen
