#include "landau/io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "snapshot payload is little-endian; big-endian hosts are unsupported");

namespace landau {

void write_snapshot(const std::string& path, const ScalarField& f, double time) {
  nlohmann::json header;
  header["d"] = f.grid.d;
  header["n"] = f.grid.n;
  header["half_width"] = f.grid.half_width;
  header["time"] = time;
  header["schema_version"] = kSnapshotSchemaVersion;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
  out << header.dump() << '\n';
  out.write(reinterpret_cast<const char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write_snapshot: short write to " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_snapshot: missing header");
  nlohmann::json header = nlohmann::json::parse(line);
  const int version = header.at("schema_version").get<int>();
  if (version != kSnapshotSchemaVersion)
    throw std::runtime_error("read_snapshot: unsupported schema_version " +
                             std::to_string(version));
  Snapshot snap;
  snap.time = header.at("time").get<double>();
  snap.field.grid = make_grid(header.at("d").get<int>(), header.at("n").get<int>(),
                              header.at("half_width").get<double>());
  snap.field.v.resize(static_cast<std::size_t>(snap.field.grid.cells));
  in.read(reinterpret_cast<char*>(snap.field.v.data()),
          static_cast<std::streamsize>(snap.field.v.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(snap.field.v.size() * sizeof(double)))
    throw std::runtime_error("read_snapshot: truncated payload in " + path);
  return snap;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace landau
