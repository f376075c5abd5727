// Copyright 2026 The dce-qfi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Binary checkpoint of an integration in progress.
//
// Layout, all multi-byte fields little-endian regardless of host:
//   char[8]  magic "DCECKPT\0"
//   u32      format version (kCheckpointVersion)
//   u32      n_fock
//   u32      frame (0 = lab, 1 = rotating)
//   u32      reserved (0)
//   f64      t, h (next step proposal), err_prev (PI controller memory)
//   i64      accepted steps, rejected steps
//   u64      config hash
//   u64      byte length L of the resolved config text, then L bytes
//   f64[2*d*d]  state matrix, column-major, (re, im) pairs, d = 2 n_fock

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "dce/hilbert.hpp"
#include "dce/integrator.hpp"
#include "dce/master_equation.hpp"

namespace dce {

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::array<char, 8> kCheckpointMagic = {'D', 'C', 'E', 'C', 'K', 'P', 'T', '\0'};

struct Checkpoint {
    IntegratorState state;
    int n_fock = 0;
    Frame frame = Frame::lab;
    std::uint64_t config_hash = 0;
    std::string config_text;
};

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(buf, 8);
}
inline void put_u32(std::ostream& os, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(buf, 4);
}
inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(std::istream& is) {
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8)) throw std::runtime_error("checkpoint truncated");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
}
inline std::uint32_t get_u32(std::istream& is) {
    unsigned char buf[4];
    if (!is.read(reinterpret_cast<char*>(buf), 4)) throw std::runtime_error("checkpoint truncated");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
}
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

} // namespace detail

inline void write_checkpoint(std::ostream& os, const Checkpoint& ck) {
    using namespace detail;
    const Index d = 2 * static_cast<Index>(ck.n_fock);
    if (ck.state.rho.rows() != d || ck.state.rho.cols() != d)
        throw std::invalid_argument("write_checkpoint: state does not match n_fock");
    os.write(kCheckpointMagic.data(), kCheckpointMagic.size());
    put_u32(os, kCheckpointVersion);
    put_u32(os, static_cast<std::uint32_t>(ck.n_fock));
    put_u32(os, ck.frame == Frame::lab ? 0u : 1u);
    put_u32(os, 0u);
    put_f64(os, ck.state.t);
    put_f64(os, ck.state.h);
    put_f64(os, ck.state.err_prev);
    put_u64(os, static_cast<std::uint64_t>(ck.state.accepted));
    put_u64(os, static_cast<std::uint64_t>(ck.state.rejected));
    put_u64(os, ck.config_hash);
    put_u64(os, ck.config_text.size());
    os.write(ck.config_text.data(), static_cast<std::streamsize>(ck.config_text.size()));
    const cplx* p = ck.state.rho.data();
    for (Index i = 0; i < d * d; ++i) {
        put_f64(os, p[i].real());
        put_f64(os, p[i].imag());
    }
    if (!os) throw std::runtime_error("write_checkpoint: stream error");
}

inline Checkpoint read_checkpoint(std::istream& is) {
    using namespace detail;
    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kCheckpointMagic)
        throw std::runtime_error("not a checkpoint file (bad magic)");
    const std::uint32_t version = get_u32(is);
    if (version != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    Checkpoint ck;
    ck.n_fock = static_cast<int>(get_u32(is));
    const std::uint32_t frame = get_u32(is);
    if (frame > 1) throw std::runtime_error("checkpoint has unknown frame tag");
    ck.frame = frame == 0 ? Frame::lab : Frame::rotating;
    get_u32(is);
    ck.state.t = get_f64(is);
    ck.state.h = get_f64(is);
    ck.state.err_prev = get_f64(is);
    ck.state.accepted = static_cast<long>(get_u64(is));
    ck.state.rejected = static_cast<long>(get_u64(is));
    ck.config_hash = get_u64(is);
    const std::uint64_t len = get_u64(is);
    if (len > (1u << 24)) throw std::runtime_error("checkpoint config text too long");
    ck.config_text.resize(len);
    if (!is.read(ck.config_text.data(), static_cast<std::streamsize>(len)))
        throw std::runtime_error("checkpoint truncated");
    HilbertConfig{ck.n_fock}.validate();
    const Index d = 2 * static_cast<Index>(ck.n_fock);
    ck.state.rho.resize(d, d);
    cplx* p = ck.state.rho.data();
    for (Index i = 0; i < d * d; ++i) {
        const double re = get_f64(is);
        const double im = get_f64(is);
        p[i] = {re, im};
    }
    return ck;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp);
        write_checkpoint(os, ck);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot move checkpoint to " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint " + path);
    return read_checkpoint(is);
}

} // namespace dce
