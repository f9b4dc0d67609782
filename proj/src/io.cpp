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

#include "boltzadj/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "boltzadj/errors.hpp"

namespace boltzadj {

namespace detail {

namespace {

template <class T>
void put_le(std::ostream& os, T v) {
    static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    os.write(buf, sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    char buf[sizeof(T)];
    if (!is.read(buf, sizeof(T))) throw IoError("unexpected end of file");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

}  // namespace

void write_u32(std::ostream& os, std::uint32_t v) { put_le(os, v); }
void write_u64(std::ostream& os, std::uint64_t v) { put_le(os, v); }
void write_f64(std::ostream& os, double v) { put_le(os, v); }
std::uint32_t read_u32(std::istream& is) { return get_le<std::uint32_t>(is); }
std::uint64_t read_u64(std::istream& is) { return get_le<std::uint64_t>(is); }
double read_f64(std::istream& is) { return get_le<double>(is); }

}  // namespace detail

namespace {

constexpr char kLogMagic[] = "BADJ1";
constexpr char kEnsembleMagic[] = "BADJE1";

void expect_magic(std::istream& is, const char* magic) {
    const std::size_t len = std::strlen(magic);
    std::string got(len, '\0');
    if (!is.read(got.data(), static_cast<std::streamsize>(len)) || got != magic) {
        throw IoError(std::string("bad magic, expected ") + magic);
    }
}

void write_vec(std::ostream& os, const Vec3& v) {
    detail::write_f64(os, v.x);
    detail::write_f64(os, v.y);
    detail::write_f64(os, v.z);
}

Vec3 read_vec(std::istream& is) {
    Vec3 v;
    v.x = detail::read_f64(is);
    v.y = detail::read_f64(is);
    v.z = detail::read_f64(is);
    return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError("file not found: " + path.string());
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    return is;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write " + path.string());
    return os;
}

}  // namespace

void write_collision_log(std::ostream& os, const CollisionLog& log) {
    os.write(kLogMagic, 5);
    detail::write_u64(os, log.n);
    detail::write_u64(os, log.steps.size());
    detail::write_f64(os, log.dt);
    detail::write_f64(os, log.mu);
    for (const CollisionStep& s : log.steps) {
        detail::write_u32(os, static_cast<std::uint32_t>(s.size()));
        for (const CollisionPairRecord& r : s) {
            detail::write_u32(os, r.i);
            detail::write_u32(os, r.j);
            write_vec(os, r.sigma);
            write_vec(os, r.alpha_hat);
        }
    }
}

CollisionLog read_collision_log(std::istream& is) {
    expect_magic(is, kLogMagic);
    CollisionLog log;
    log.n = detail::read_u64(is);
    const std::uint64_t m = detail::read_u64(is);
    log.dt = detail::read_f64(is);
    log.mu = detail::read_f64(is);
    if (m > (1ULL << 32)) throw IoError("implausible step count in collision log");
    log.steps.resize(m);
    for (CollisionStep& s : log.steps) {
        const std::uint32_t count = detail::read_u32(is);
        if (2ULL * count > log.n) throw IoError("pair count exceeds N/2 in collision log");
        s.resize(count);
        for (CollisionPairRecord& r : s) {
            r.i = detail::read_u32(is);
            r.j = detail::read_u32(is);
            if (r.i >= log.n || r.j >= log.n) throw IoError("particle index out of range in log");
            r.sigma = read_vec(is);
            r.alpha_hat = read_vec(is);
        }
    }
    return log;
}

void save_collision_log(const std::filesystem::path& path, const CollisionLog& log) {
    auto os = open_out(path);
    write_collision_log(os, log);
    if (!os) throw IoError("write failed: " + path.string());
}

CollisionLog load_collision_log(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_collision_log(is);
}

void write_ensemble(std::ostream& os, const ParticleEnsemble& ens) {
    os.write(kEnsembleMagic, 6);
    detail::write_u64(os, ens.size());
    detail::write_u64(os, ens.time_index);
    for (const Vec3& v : ens.velocities) write_vec(os, v);
}

ParticleEnsemble read_ensemble(std::istream& is) {
    expect_magic(is, kEnsembleMagic);
    ParticleEnsemble ens;
    const std::uint64_t n = detail::read_u64(is);
    ens.time_index = detail::read_u64(is);
    if (n > (1ULL << 32)) throw IoError("implausible particle count in ensemble snapshot");
    ens.velocities.resize(n);
    for (Vec3& v : ens.velocities) v = read_vec(is);
    return ens;
}

void save_ensemble(const std::filesystem::path& path, const ParticleEnsemble& ens) {
    auto os = open_out(path);
    write_ensemble(os, ens);
    if (!os) throw IoError("write failed: " + path.string());
}

ParticleEnsemble load_ensemble(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_ensemble(is);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string moments_csv(std::span<const MomentSnapshot> history) {
    std::string out = "k,t,px,py,pz,Tx,Ty,Tz,m4x,m4y,m4z\n";
    for (const MomentSnapshot& s : history) {
        out += std::to_string(s.k);
        out += ',' + format_double(s.t);
        for (double x : s.p) out += ',' + format_double(x);
        for (double x : s.temperature) out += ',' + format_double(x);
        for (double x : s.m4) out += ',' + format_double(x);
        out += '\n';
    }
    return out;
}

std::vector<MomentSnapshot> parse_moments_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "k,t,px,py,pz,Tx,Ty,Tz,m4x,m4y,m4z") {
        throw IoError("moments CSV: unexpected header");
    }
    std::vector<MomentSnapshot> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 11) throw IoError("moments CSV: expected 11 columns");
        MomentSnapshot s;
        try {
            s.k = std::stoull(cells[0]);
            s.t = std::stod(cells[1]);
            for (std::size_t c = 0; c < 3; ++c) {
                s.p[c] = std::stod(cells[2 + c]);
                s.temperature[c] = std::stod(cells[5 + c]);
                s.m4[c] = std::stod(cells[8 + c]);
            }
        } catch (const std::exception&) {
            throw IoError("moments CSV: unparsable number in row " + std::to_string(out.size()));
        }
        out.push_back(s);
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    auto os = open_out(path);
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace boltzadj
