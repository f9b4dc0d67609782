/*
   Copyright 2026 The boltzadj Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "boltzadj/core.hpp"
#include "boltzadj/forward_dsmc.hpp"

namespace boltzadj {

/*!
 * Binary formats, all little-endian.
 *
 * Collision log:
 *   "BADJ1" | u64 N | u64 M | f64 dt | f64 mu
 *   M times: u32 count, then count x (u32 i, u32 j, 3 f64 sigma, 3 f64 alpha_hat)
 *
 * Ensemble snapshot:
 *   "BADJE1" | u64 N | u64 k | N x 3 f64
 *
 * Grid snapshot (see continuous_grid.hpp):
 *   u64 n_grid | f64 v_th | f64 t | n_grid^3 f64, x fastest
 */
void write_collision_log(std::ostream& os, const CollisionLog& log);
CollisionLog read_collision_log(std::istream& is);
void save_collision_log(const std::filesystem::path& path, const CollisionLog& log);
/// Throws IoError ("file not found: ...") when the path does not exist.
CollisionLog load_collision_log(const std::filesystem::path& path);

void write_ensemble(std::ostream& os, const ParticleEnsemble& ens);
ParticleEnsemble read_ensemble(std::istream& is);
void save_ensemble(const std::filesystem::path& path, const ParticleEnsemble& ens);
ParticleEnsemble load_ensemble(const std::filesystem::path& path);

/// Header k,t,px,py,pz,Tx,Ty,Tz,m4x,m4y,m4z; values printed with %.17g.
std::string moments_csv(std::span<const MomentSnapshot> history);
std::vector<MomentSnapshot> parse_moments_csv(const std::string& text);

/// Shortest round-tripping decimal ("%.17g").
std::string format_double(double x);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

namespace detail {
void write_u32(std::ostream& os, std::uint32_t v);
void write_u64(std::ostream& os, std::uint64_t v);
void write_f64(std::ostream& os, double v);
std::uint32_t read_u32(std::istream& is);
std::uint64_t read_u64(std::istream& is);
double read_f64(std::istream& is);
}  // namespace detail

}  // namespace boltzadj
