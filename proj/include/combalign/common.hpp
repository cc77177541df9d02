// combalign - network-wide beam alignment simulator for sub-THz D2D links
// Copyright (C) 2026 the combalign authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// -------------------------------------------------------------------------

#ifndef COMBALIGN_COMMON_HPP
#define COMBALIGN_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace combalign
{

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Eigen::VectorXi;

constexpr double pi = 3.141592653589793238462643383279502884;
constexpr double speed_of_light = 299792458.0; // m/s

// Cartesian point / direction in the room frame.
struct Vec3
{
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const
    {
        double n = norm();
        if (n == 0.0)
            throw std::invalid_argument("Vec3::normalized: zero vector");
        return {x / n, y / n, z / n};
    }
};

// Throws std::invalid_argument with <where>: <what> when cond is false.
inline void require(bool cond, const std::string &where, const std::string &what)
{
    if (!cond)
        throw std::invalid_argument(where + ": " + what);
}

inline double db10(double power_ratio) { return 10.0 * std::log10(power_ratio); }
inline double db20(double amplitude_ratio) { return 20.0 * std::log10(amplitude_ratio); }
inline double from_db10(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

} // namespace combalign

#endif
