#include "nobs/checkpoint.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "nobs/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "container formats are little-endian");

namespace nobs {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'N', 'O', 'B', 'S', 'C', 'K', '0', '1'};

json stats_to_json(const std::vector<ChannelStats>& v) {
  json a = json::array();
  for (const auto& s : v) a.push_back({{"mean", s.mean}, {"std", s.stddev}});
  return a;
}

std::vector<ChannelStats> stats_from_json(const json& a) {
  std::vector<ChannelStats> v;
  for (const auto& e : a) v.push_back({e.at("mean").get<double>(), e.at("std").get<double>()});
  return v;
}

const char* system_name(SystemKind s) {
  switch (s) {
    case SystemKind::ReactionDiffusion: return "reaction_diffusion";
    case SystemKind::PrescribedTime: return "prescribed_time";
    case SystemKind::Traffic: return "traffic";
  }
  return "?";
}

SystemKind system_from(const std::string& s) {
  if (s == "reaction_diffusion") return SystemKind::ReactionDiffusion;
  if (s == "prescribed_time") return SystemKind::PrescribedTime;
  if (s == "traffic") return SystemKind::Traffic;
  throw HeaderMismatch("unknown system: " + s);
}

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& ck) {
  const FnoModel& m = ck.model;
  json h;
  h["kind"] = m.kind == FnoKind::Feedforward ? "feedforward" : "recurrent";
  h["system"] = system_name(m.system);
  h["config"] = {{"n_layers", m.cfg.n_layers}, {"width", m.cfg.width},
                 {"modes_x", m.cfg.modes_x},   {"modes_t", m.cfg.modes_t},
                 {"in_channels", m.cfg.in_channels}, {"out_channels", m.cfg.out_channels}};
  h["t_len"] = m.t_len;
  h["x_len"] = m.x_len;
  h["state_components"] = m.state_components;
  h["measurement_channels"] = m.measurement_channels;
  h["normalization"] = {{"ic_hat", stats_to_json(m.norm.ic_hat)},
                        {"measurement", stats_to_json(m.norm.measurement)},
                        {"target", stats_to_json(m.norm.target)}};
  json params = json::array();
  long offset = 0;  // in doubles, from payload start
  for (std::size_t i = 0; i < m.params.tensors.size(); ++i) {
    const Tensor& t = m.params.tensors[i];
    params.push_back({{"name", m.params.names[i]},
                      {"shape", t.shape},
                      {"complex", t.complex},
                      {"offset", offset}});
    offset += t.storage();
  }
  h["params"] = std::move(params);
  h["payload_doubles"] = offset;
  json meta = json::object();
  for (const auto& [k, v] : ck.meta) meta[k] = v;
  h["meta"] = std::move(meta);
  const std::string header = h.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(kMagic, 8);
  const std::uint32_t hlen = static_cast<std::uint32_t>(header.size());
  os.write(reinterpret_cast<const char*>(&hlen), 4);
  os.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const auto& t : m.params.tensors)
    os.write(reinterpret_cast<const char*>(t.data.data()),
             static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  if (!os) throw IoError("write failed: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  if (!std::filesystem::exists(path)) throw MissingCheckpoint("no checkpoint at " + path);
  std::ifstream is(path, std::ios::binary);
  if (!is) throw MissingCheckpoint("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, 8);
  if (is.gcount() != 8 || std::memcmp(magic, kMagic, 8) != 0)
    throw BadMagic("not a checkpoint container: " + path);
  std::uint32_t hlen = 0;
  is.read(reinterpret_cast<char*>(&hlen), 4);
  if (is.gcount() != 4) throw TruncatedPayload("header length missing");
  std::string header(hlen, '\0');
  is.read(header.data(), hlen);
  if (is.gcount() != static_cast<std::streamsize>(hlen))
    throw TruncatedPayload("header truncated");

  json h;
  try {
    h = json::parse(header);
  } catch (const std::exception& e) {
    throw HeaderMismatch(std::string("header is not valid JSON: ") + e.what());
  }

  Checkpoint ck;
  FnoModel& m = ck.model;
  try {
    const std::string kind = h.at("kind").get<std::string>();
    if (kind == "feedforward")
      m.kind = FnoKind::Feedforward;
    else if (kind == "recurrent")
      m.kind = FnoKind::Recurrent;
    else
      throw HeaderMismatch("unknown model kind: " + kind);
    m.system = system_from(h.at("system").get<std::string>());
    const auto& c = h.at("config");
    m.cfg.n_layers = c.at("n_layers").get<int>();
    m.cfg.width = c.at("width").get<int>();
    m.cfg.modes_x = c.at("modes_x").get<int>();
    m.cfg.modes_t = c.at("modes_t").get<int>();
    m.cfg.in_channels = c.at("in_channels").get<int>();
    m.cfg.out_channels = c.at("out_channels").get<int>();
    m.t_len = h.at("t_len").get<long>();
    m.x_len = h.at("x_len").get<long>();
    m.state_components = h.at("state_components").get<int>();
    m.measurement_channels = h.at("measurement_channels").get<int>();
    const auto& nz = h.at("normalization");
    m.norm.ic_hat = stats_from_json(nz.at("ic_hat"));
    m.norm.measurement = stats_from_json(nz.at("measurement"));
    m.norm.target = stats_from_json(nz.at("target"));

    long expected = 0;
    for (const auto& pe : h.at("params")) {
      Tensor t;
      t.shape = pe.at("shape").get<std::vector<long>>();
      t.complex = pe.at("complex").get<bool>();
      if (pe.at("offset").get<long>() != expected)
        throw HeaderMismatch("parameter offsets are not contiguous");
      t.data.resize(t.storage());
      expected += t.storage();
      m.params.add(pe.at("name").get<std::string>(), std::move(t));
    }
    if (h.at("payload_doubles").get<long>() != expected)
      throw HeaderMismatch("declared payload size does not match parameter table");
    for (const auto& [k, v] : h.at("meta").items()) ck.meta[k] = v.get<double>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw HeaderMismatch(std::string("header field error: ") + e.what());
  }

  for (auto& t : m.params.tensors) {
    is.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (is.gcount() != static_cast<std::streamsize>(t.data.size() * sizeof(double)))
      throw TruncatedPayload("parameter payload truncated");
  }
  char extra;
  is.read(&extra, 1);
  if (is.gcount() == 1) throw HeaderMismatch("payload longer than header declares");
  return ck;
}

}  // namespace nobs
