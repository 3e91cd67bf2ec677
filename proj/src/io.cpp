#include "eqflow/io.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace eqflow {

namespace {

void put_magic(std::ostream& os, const char magic[6]) { os.write(magic, 5); }

void put_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}

void put_f32(std::ostream& os, const double* p, std::size_t n) {
  std::vector<float> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = static_cast<float>(p[i]);
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(4 * n));
}

struct Reader {
  std::ifstream is;
  std::string path;

  explicit Reader(const std::string& p) : is(p, std::ios::binary), path(p) {
    require(is.good(), "cannot open " + p);
  }

  void expect_magic(const char magic[6]) {
    char got[5];
    is.read(got, 5);
    require(is.good() && std::memcmp(got, magic, 5) == 0,
            path + ": not a " + std::string(magic) + " file");
  }

  std::uint32_t u32() {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    require(is.good(), path + ": truncated header");
    return v;
  }

  void f32(double* p, std::size_t n) {
    std::vector<float> buf(n);
    is.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(4 * n));
    require(is.good(), path + ": truncated payload");
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(buf[i]);
  }

  void expect_eof() {
    is.peek();
    require(is.eof(), path + ": trailing bytes");
  }
};

void put_widths(std::ostream& os, const std::vector<int>& widths) {
  put_u32(os, static_cast<std::uint32_t>(widths.size()));
  for (int wv : widths) put_u32(os, static_cast<std::uint32_t>(wv));
}

std::vector<int> get_widths(Reader& r, int max_count = 64) {
  int count = static_cast<int>(r.u32());
  require(count >= 1 && count <= max_count, r.path + ": bad layer count");
  std::vector<int> widths(count);
  for (int& wv : widths) {
    wv = static_cast<int>(r.u32());
    require(wv >= 1 && wv <= (1 << 20), r.path + ": bad layer size");
  }
  return widths;
}

}  // namespace

void atomic_write(const std::string& path,
                  const std::function<void(std::ostream&)>& fn) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    require(os.good(), "cannot write " + tmp.string());
    fn(os);
    os.flush();
    require(os.good(), "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  require(!ec, "cannot rename " + tmp.string() + " to " + path);
}

void write_dataset(const std::string& path, const Mat& samples) {
  require(samples.size() > 0, "write_dataset: empty matrix");
  atomic_write(path, [&](std::ostream& os) {
    put_magic(os, "EQFD1");
    put_u32(os, 2);
    put_u32(os, static_cast<std::uint32_t>(samples.cols()));
    put_u32(os, static_cast<std::uint32_t>(samples.rows()));
    put_f32(os, samples.data(), static_cast<std::size_t>(samples.size()));
  });
}

void write_dataset(const std::string& path, const std::vector<Grid>& grids) {
  require(!grids.empty(), "write_dataset: no grids");
  const Grid& g0 = grids.front();
  atomic_write(path, [&](std::ostream& os) {
    put_magic(os, "EQFD1");
    put_u32(os, 4);
    put_u32(os, static_cast<std::uint32_t>(grids.size()));
    put_u32(os, static_cast<std::uint32_t>(g0.c));
    put_u32(os, static_cast<std::uint32_t>(g0.h));
    put_u32(os, static_cast<std::uint32_t>(g0.w));
    for (const Grid& g : grids) {
      require(g.c == g0.c && g.h == g0.h && g.w == g0.w,
              "write_dataset: mixed grid shapes");
      put_f32(os, g.data.data(), static_cast<std::size_t>(g.data.size()));
    }
  });
}

namespace {

std::vector<Grid> read_grid_block(Reader& r) {
  int n = static_cast<int>(r.u32());
  int c = static_cast<int>(r.u32());
  int h = static_cast<int>(r.u32());
  int w = static_cast<int>(r.u32());
  require(n >= 1 && c >= 1 && h >= 1 && w >= 1 && c <= 64 && h <= 16384 &&
              w <= 16384,
          r.path + ": implausible grid header");
  std::vector<Grid> grids;
  grids.reserve(n);
  for (int i = 0; i < n; ++i) {
    Grid g(c, h, w);
    r.f32(g.data.data(), static_cast<std::size_t>(g.data.size()));
    grids.push_back(std::move(g));
  }
  r.expect_eof();
  return grids;
}

}  // namespace

Dataset read_dataset(const std::string& path) {
  Reader r(path);
  r.expect_magic("EQFD1");
  Dataset out;
  out.rank = static_cast<int>(r.u32());
  if (out.rank == 2) {
    int n = static_cast<int>(r.u32());
    int d = static_cast<int>(r.u32());
    require(n >= 1 && d >= 1 && d <= (1 << 20),
            path + ": implausible vector header");
    out.vectors.resize(d, n);
    r.f32(out.vectors.data(), static_cast<std::size_t>(out.vectors.size()));
    r.expect_eof();
  } else if (out.rank == 4) {
    out.grids = read_grid_block(r);
  } else {
    throw InputError(path + ": unsupported rank");
  }
  return out;
}

void write_rollout(const std::string& path, const std::vector<Grid>& frames) {
  require(!frames.empty(), "write_rollout: no frames");
  const Grid& g0 = frames.front();
  atomic_write(path, [&](std::ostream& os) {
    put_magic(os, "EQFR1");
    put_u32(os, 4);
    put_u32(os, static_cast<std::uint32_t>(frames.size()));
    put_u32(os, static_cast<std::uint32_t>(g0.c));
    put_u32(os, static_cast<std::uint32_t>(g0.h));
    put_u32(os, static_cast<std::uint32_t>(g0.w));
    for (const Grid& g : frames) {
      require(g.c == g0.c && g.h == g0.h && g.w == g0.w,
              "write_rollout: mixed frame shapes");
      put_f32(os, g.data.data(), static_cast<std::size_t>(g.data.size()));
    }
  });
}

std::vector<Grid> read_rollout(const std::string& path) {
  Reader r(path);
  r.expect_magic("EQFR1");
  require(r.u32() == 4, path + ": rollouts are rank-4 containers");
  return read_grid_block(r);
}

void save_velocity_net(const std::string& path, const VelocityNetwork& net) {
  atomic_write(path, [&](std::ostream& os) {
    put_magic(os, "EQFV1");
    put_u32(os, static_cast<std::uint32_t>(net.dim()));
    put_u32(os, static_cast<std::uint32_t>(net.pe_octaves()));
    put_widths(os, net.net().widths());
    put_f32(os, net.net().params().data(),
            static_cast<std::size_t>(net.net().n_params()));
    put_f32(os, net.running_mean().data(),
            static_cast<std::size_t>(net.running_mean().size()));
    put_f32(os, net.running_var().data(),
            static_cast<std::size_t>(net.running_var().size()));
  });
}

VelocityNetwork load_velocity_net(const std::string& path) {
  Reader r(path);
  r.expect_magic("EQFV1");
  VelocityNetConfig cfg;
  cfg.dim = static_cast<int>(r.u32());
  cfg.pe_octaves = static_cast<int>(r.u32());
  require(cfg.dim >= 1 && cfg.dim <= (1 << 16) && cfg.pe_octaves >= 0 &&
              cfg.pe_octaves <= 32,
          path + ": implausible network header");
  std::vector<int> widths = get_widths(r);
  require(widths.size() >= 2 && widths.back() == cfg.dim,
          path + ": layer sizes do not end at the state dimension");
  cfg.hidden.assign(widths.begin() + 1, widths.end() - 1);
  VelocityNetwork net(cfg);
  require(net.net().widths() == widths,
          path + ": layer sizes do not match the encoded input width");
  r.f32(net.net().params().data(),
        static_cast<std::size_t>(net.net().n_params()));
  r.f32(net.running_mean().data(),
        static_cast<std::size_t>(net.running_mean().size()));
  r.f32(net.running_var().data(),
        static_cast<std::size_t>(net.running_var().size()));
  r.expect_eof();
  return net;
}

void save_denoiser(const std::string& path, const DenseDenoiser& m) {
  atomic_write(path, [&](std::ostream& os) {
    put_magic(os, "EQFS1");
    os.put(m.objective() == Objective::Eps ? 0 : 1);
    os.put(0);  // dense
    put_u32(os, static_cast<std::uint32_t>(m.dim()));
    put_u32(os, static_cast<std::uint32_t>(m.pe_octaves()));
    put_widths(os, m.net().widths());
    put_f32(os, m.net().params().data(),
            static_cast<std::size_t>(m.net().n_params()));
  });
}

void save_denoiser(const std::string& path, const GridDenoiser& m) {
  atomic_write(path, [&](std::ostream& os) {
    put_magic(os, "EQFS1");
    os.put(m.objective() == Objective::Eps ? 0 : 1);
    os.put(1);  // grid
    put_u32(os, static_cast<std::uint32_t>(m.channels()));
    put_widths(os, m.widths());
    put_f32(os, m.params().data(), static_cast<std::size_t>(m.n_params()));
  });
}

LoadedDenoiser load_denoiser(const std::string& path) {
  Reader r(path);
  r.expect_magic("EQFS1");
  int obj_tag = r.is.get();
  int kind = r.is.get();
  require(r.is.good() && (obj_tag == 0 || obj_tag == 1) &&
              (kind == 0 || kind == 1),
          path + ": bad objective or kind tag");
  Objective obj = obj_tag == 0 ? Objective::Eps : Objective::V;

  LoadedDenoiser out;
  out.kind = kind;
  if (kind == 0) {
    int d = static_cast<int>(r.u32());
    int pe = static_cast<int>(r.u32());
    require(d >= 1 && d <= (1 << 16) && pe >= 0 && pe <= 32,
            path + ": implausible denoiser header");
    std::vector<int> widths = get_widths(r);
    require(widths.size() >= 2 && widths.back() == d,
            path + ": layer sizes do not end at the state dimension");
    std::vector<int> hidden(widths.begin() + 1, widths.end() - 1);
    out.dense = DenseDenoiser(d, obj, pe, hidden, 0);
    require(out.dense.net().widths() == widths,
            path + ": layer sizes do not match the encoded input width");
    r.f32(out.dense.net().params().data(),
          static_cast<std::size_t>(out.dense.net().n_params()));
  } else {
    int c = static_cast<int>(r.u32());
    require(c >= 1 && c <= 64, path + ": implausible channel count");
    std::vector<int> widths = get_widths(r, 16);
    out.grid = GridDenoiser(c, obj, widths, 0);
    r.f32(out.grid.params().data(),
          static_cast<std::size_t>(out.grid.n_params()));
  }
  r.expect_eof();
  return out;
}

void write_manifest(const std::string& artifact_path,
                    const std::string& command,
                    const std::map<std::string, std::string>& config,
                    const std::vector<std::string>& inputs) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["artifact"] = std::filesystem::path(artifact_path).filename().string();
  j["config"] = config;
  j["inputs"] = inputs;
  atomic_write(artifact_path + ".manifest.json",
               [&](std::ostream& os) { os << j.dump(2) << "\n"; });
}

}  // namespace eqflow
