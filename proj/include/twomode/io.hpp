#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "twomode/errors.hpp"
#include "twomode/evolve.hpp"
#include "twomode/observables.hpp"

namespace twomode {

namespace detail_io {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_raw(std::ofstream& out, const void* data, std::size_t bytes) {
    out.write(static_cast<const char*>(data), std::streamsize(bytes));
    if (!out) throw IoError("write failed");
}

inline void read_raw(std::ifstream& in, void* data, std::size_t bytes) {
    in.read(static_cast<char*>(data), std::streamsize(bytes));
    if (!in) throw IoError("read failed or file truncated");
}

inline void write_field(std::ofstream& out, const Field& f) {
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double re = f[i].real(), im = f[i].imag();
        write_raw(out, &re, sizeof re);
        write_raw(out, &im, sizeof im);
    }
}

inline Field read_field(std::ifstream& in, Eigen::Index n) {
    Field f(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double re = 0, im = 0;
        read_raw(in, &re, sizeof re);
        read_raw(in, &im, sizeof im);
        f[i] = Complex(re, im);
    }
    return f;
}

}  // namespace detail_io

// t, N2, E, tr mu, inner iterations, pre-renormalization norm deviation.
class TimeseriesWriter {
  public:
    explicit TimeseriesWriter(const std::filesystem::path& path) : out_(path) {
        if (!out_) throw IoError("cannot open " + path.string());
        out_ << "t,N2,E,tr_mu,inner_iterations,norm_residual\n";
    }

    void append(const SimState& s) {
        out_ << detail_io::fmt(s.t) << ',' << detail_io::fmt(s.n_two) << ','
             << detail_io::fmt(s.energy) << ',' << detail_io::fmt(std::real(s.mu.trace())) << ','
             << s.diag.inner_iterations << ','
             << detail_io::fmt(std::abs(s.diag.pre_renorm_norm - 1.0)) << '\n';
        if (!out_) throw IoError("timeseries write failed");
    }

  private:
    std::ofstream out_;
};

class AmplitudesWriter {
  public:
    AmplitudesWriter(const std::filesystem::path& path, int boson_count) : out_(path) {
        if (!out_) throw IoError("cannot open " + path.string());
        out_ << 't';
        for (int k = -boson_count / 2; k <= boson_count / 2; ++k) out_ << ",bk2_" << k;
        out_ << '\n';
    }

    void append(const SimState& s) {
        out_ << detail_io::fmt(s.t);
        for (Eigen::Index i = 0; i < s.amps.b.size(); ++i)
            out_ << ',' << detail_io::fmt(std::norm(s.amps.b[i]));
        out_ << '\n';
        if (!out_) throw IoError("amplitudes write failed");
    }

  private:
    std::ofstream out_;
};

// Flat binary snapshot: phi_1 then phi_2 as little-endian float64 interleaved
// re/im, plus density and the G1 band coefficients in a text sidecar. The
// full grid-pair G1 matrix is written only on request.
inline void write_mode_snapshot(const std::filesystem::path& dir, long step, const Grid& grid,
                                const SimState& state, bool emit_g1) {
    char tag[32];
    std::snprintf(tag, sizeof(tag), "%08ld", step);
    const std::filesystem::path bin = dir / ("modes_" + std::string(tag) + ".bin");
    std::ofstream out(bin, std::ios::binary);
    if (!out) throw IoError("cannot open " + bin.string());
    detail_io::write_field(out, state.modes.phi[0]);
    detail_io::write_field(out, state.modes.phi[1]);

    const CorrelationField corr = g1(grid, state.amps, state.modes);
    const RealField dens = corr.diagonal();
    const std::filesystem::path dens_path = dir / ("density_" + std::string(tag) + ".bin");
    std::ofstream dout(dens_path, std::ios::binary);
    if (!dout) throw IoError("cannot open " + dens_path.string());
    for (Eigen::Index i = 0; i < dens.size(); ++i) {
        const double v = dens[i];
        detail_io::write_raw(dout, &v, sizeof v);
    }

    std::ofstream hdr(dir / ("modes_" + std::string(tag) + ".hdr"));
    hdr << "time " << detail_io::fmt(state.t) << '\n'
        << "grid " << grid.nx << ' ' << grid.ny << ' ' << grid.nz << '\n'
        << "spacing " << detail_io::fmt(grid.dx) << ' ' << detail_io::fmt(grid.dy) << ' '
        << detail_io::fmt(grid.dz) << '\n'
        << "layout float64 little_endian interleaved_re_im\n"
        << "fields phi1 phi2\n"
        << "density_file " << dens_path.filename().string() << " float64\n";
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            hdr << "g1_band_" << i + 1 << j + 1 << ' ' << detail_io::fmt(corr.coeff(i, j).real())
                << ' ' << detail_io::fmt(corr.coeff(i, j).imag()) << '\n';
    if (!hdr) throw IoError("snapshot header write failed");

    if (emit_g1) {
        const Eigen::MatrixXcd full = corr.full(grid);
        const std::filesystem::path g1_path = dir / ("g1_" + std::string(tag) + ".bin");
        std::ofstream gout(g1_path, std::ios::binary);
        if (!gout) throw IoError("cannot open " + g1_path.string());
        for (Eigen::Index r = 0; r < full.rows(); ++r)
            for (Eigen::Index c = 0; c < full.cols(); ++c) {
                const double re = full(r, c).real(), im = full(r, c).imag();
                detail_io::write_raw(gout, &re, sizeof re);
                detail_io::write_raw(gout, &im, sizeof im);
            }
    }
}

// Binary checkpoint carrying everything run_from needs to continue bit-stably.
inline void write_checkpoint(const std::filesystem::path& path, const SimState& state,
                             const Grid& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string());
    const char magic[8] = {'T', 'M', 'C', 'H', 'K', 'P', 'T', '1'};
    detail_io::write_raw(out, magic, sizeof magic);
    const std::int64_t step = state.step;
    const std::int32_t n = state.amps.boson_count();
    const std::int32_t dims[3] = {grid.nx, grid.ny, grid.nz};
    detail_io::write_raw(out, &step, sizeof step);
    detail_io::write_raw(out, &state.t, sizeof state.t);
    detail_io::write_raw(out, &n, sizeof n);
    detail_io::write_raw(out, dims, sizeof dims);
    detail_io::write_field(out, state.amps.b);
    detail_io::write_field(out, state.modes.phi[0]);
    detail_io::write_field(out, state.modes.phi[1]);
    detail_io::write_field(out, state.modes.dt_phi[0]);
    detail_io::write_field(out, state.modes.dt_phi[1]);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double re = state.mu(i, j).real(), im = state.mu(i, j).imag();
            detail_io::write_raw(out, &re, sizeof re);
            detail_io::write_raw(out, &im, sizeof im);
        }
}

inline SimState read_checkpoint(const std::filesystem::path& path, const Grid& grid,
                                int boson_count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[8];
    detail_io::read_raw(in, magic, sizeof magic);
    if (std::string(magic, 8) != "TMCHKPT1") throw IoError("not a checkpoint file");
    SimState state;
    std::int64_t step = 0;
    std::int32_t n = 0;
    std::int32_t dims[3];
    detail_io::read_raw(in, &step, sizeof step);
    detail_io::read_raw(in, &state.t, sizeof state.t);
    detail_io::read_raw(in, &n, sizeof n);
    detail_io::read_raw(in, dims, sizeof dims);
    if (n != boson_count) throw IoError("checkpoint boson count does not match configuration");
    if (dims[0] != grid.nx || dims[1] != grid.ny || dims[2] != grid.nz)
        throw IoError("checkpoint grid does not match configuration");
    state.step = step;
    state.amps.b = detail_io::read_field(in, n + 1);
    state.amps.time = state.t;
    state.modes.phi[0] = detail_io::read_field(in, grid.size());
    state.modes.phi[1] = detail_io::read_field(in, grid.size());
    state.modes.dt_phi[0] = detail_io::read_field(in, grid.size());
    state.modes.dt_phi[1] = detail_io::read_field(in, grid.size());
    state.modes.time = state.t;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double re = 0, im = 0;
            detail_io::read_raw(in, &re, sizeof re);
            detail_io::read_raw(in, &im, sizeof im);
            state.mu(i, j) = Complex(re, im);
        }
    return state;
}

}  // namespace twomode
