#include "fixgraph/checkpoint.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "fixgraph/errors.hpp"

namespace fixgraph {

namespace {

constexpr char kMagic[] = "PSGAT1\n";

}  // namespace

void save_checkpoint(std::ostream& os, const GatModel& model, const CheckpointInfo& info) {
  nlohmann::ordered_json header;
  header["format"] = "PSGAT1";
  header["config"] = {{"layers", model.config.layers},
                      {"input_dim", model.config.input_dim},
                      {"hidden_dim", model.config.hidden_dim},
                      {"mlp_hidden", model.config.mlp_hidden},
                      {"negative_slope", model.config.negative_slope}};
  header["seed"] = info.seed;
  header["epoch"] = info.epoch;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  for (const auto& [k, v] : info.metrics) metrics[k] = v;
  header["metrics"] = std::move(metrics);
  header["parameter_count"] = model.parameter_count();
  os.write(kMagic, sizeof(kMagic) - 1);
  os << header.dump() << '\n';
  const Eigen::VectorXd flat = model.flatten();
  for (Eigen::Index i = 0; i < flat.size(); ++i) detail::write_f64_le(os, flat(i));
}

void save_checkpoint_file(const std::string& path, const GatModel& model,
                          const CheckpointInfo& info) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  save_checkpoint(os, model, info);
  if (!os) throw IoError("failed writing " + path);
}

Checkpoint load_checkpoint(std::istream& is) {
  const std::string text = detail::read_header(is, kMagic);
  Checkpoint ckpt;
  try {
    const auto header = nlohmann::json::parse(text);
    const auto& jc = header.at("config");
    GatConfig cfg;
    cfg.layers = jc.at("layers").get<int>();
    cfg.input_dim = jc.at("input_dim").get<int>();
    cfg.hidden_dim = jc.at("hidden_dim").get<int>();
    cfg.mlp_hidden = jc.at("mlp_hidden").get<int>();
    cfg.negative_slope = jc.at("negative_slope").get<double>();
    ckpt.info.seed = header.at("seed").get<std::uint64_t>();
    ckpt.info.epoch = header.at("epoch").get<int>();
    for (const auto& [k, v] : header.at("metrics").items()) ckpt.info.metrics[k] = v.get<double>();
    ckpt.model = init_model(cfg, 0);
    if (header.at("parameter_count").get<std::size_t>() != ckpt.model.parameter_count()) {
      throw VersionMismatch("checkpoint parameter count does not match its configuration");
    }
  } catch (const nlohmann::json::exception& e) {
    throw VersionMismatch(std::string("incompatible checkpoint header: ") + e.what());
  } catch (const BadConfig& e) {
    throw VersionMismatch(std::string("incompatible checkpoint header: ") + e.what());
  }
  Eigen::VectorXd flat(static_cast<Eigen::Index>(ckpt.model.parameter_count()));
  for (Eigen::Index i = 0; i < flat.size(); ++i) flat(i) = detail::read_f64_le(is);
  ckpt.model.assign(flat);
  return ckpt;
}

Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  return load_checkpoint(is);
}

}  // namespace fixgraph
