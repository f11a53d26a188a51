#include "rudn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include <json.hpp>

#include "rudn/errors.hpp"

namespace rudn {

namespace {

using nlohmann::json;

void put_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  }
  return v;
}

void append_f32_le(std::string& blob, const std::vector<float>& values) {
  for (float f : values) {
    std::uint32_t u = std::bit_cast<std::uint32_t>(f);
    for (int i = 0; i < 4; ++i) {
      blob.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
    }
  }
}

std::vector<float> read_f32_le(const unsigned char* p, std::size_t count) {
  std::vector<float> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::uint32_t u = 0;
    for (int i = 0; i < 4; ++i) {
      u |= static_cast<std::uint32_t>(p[4 * k + i]) << (8 * i);
    }
    out[k] = std::bit_cast<float>(u);
  }
  return out;
}

json shape_json(const Shape& s) { return json::array({s.n, s.h, s.w, s.c}); }

Shape shape_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw data_error("checkpoint: malformed shape entry");
  }
  return Shape{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(),
               j[3].get<int>()};
}

struct NamedTensor {
  std::string name;
  const Tensor* tensor;
};

// Canonical serialization order: trainable parameters, BN running stats,
// then Adam first and second moments (when present).
std::vector<NamedTensor> collect(ResUNet<float>& model, Adam<float>* adam,
                                 std::vector<Tensor>* adam_storage) {
  std::vector<NamedTensor> out;
  for (Parameter<float>* p : model.params()) {
    out.push_back({p->name, &p->value});
  }
  for (auto& [name, tensor] : model.state_tensors()) {
    out.push_back({name, tensor});
  }
  if (adam != nullptr) {
    const auto& params = adam->params();
    adam_storage->clear();
    adam_storage->reserve(2 * params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      Tensor t(params[i]->value.shape);
      t.data = adam->m(i);
      adam_storage->push_back(std::move(t));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      Tensor t(params[i]->value.shape);
      t.data = adam->v(i);
      adam_storage->push_back(std::move(t));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      out.push_back({"adam.m." + params[i]->name, &(*adam_storage)[i]});
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      out.push_back(
          {"adam.v." + params[i]->name, &(*adam_storage)[params.size() + i]});
    }
  }
  return out;
}

}  // namespace

void save_checkpoint(const std::string& path, ResUNet<float>& model,
                     std::uint64_t extractor_seed, const CheckpointMeta& meta,
                     Adam<float>* adam) {
  std::vector<Tensor> adam_storage;
  const std::vector<NamedTensor> tensors =
      collect(model, adam, &adam_storage);

  json manifest;
  const ModelConfig& cfg = model.config();
  manifest["format"] = 1;
  manifest["model"] = {{"height", cfg.input_height},
                       {"width", cfg.input_width},
                       {"depth", cfg.depth},
                       {"channels", cfg.channels},
                       {"bottleneck", cfg.bottleneck_channels},
                       {"seed", cfg.seed}};
  manifest["extractor_seed"] = extractor_seed;
  manifest["meta"] = {{"epoch", meta.epoch},
                      {"seed", meta.seed},
                      {"train_loss", meta.train_loss},
                      {"val_loss", meta.val_loss}};
  manifest["adam"] = {{"present", adam != nullptr},
                      {"t", adam != nullptr ? adam->t() : 0}};

  std::string blob;
  json table = json::array();
  for (const NamedTensor& nt : tensors) {
    json entry;
    entry["name"] = nt.name;
    entry["dtype"] = "f32";
    entry["shape"] = shape_json(nt.tensor->shape);
    entry["offset"] = static_cast<std::uint64_t>(blob.size());
    table.push_back(std::move(entry));
    append_f32_le(blob, nt.tensor->data);
  }
  manifest["tensors"] = std::move(table);

  const std::string text = manifest.dump();
  std::string header(kCheckpointMagic, sizeof kCheckpointMagic);
  put_u64_le(header, text.size());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw data_error(path + ": cannot open checkpoint for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw data_error(path + ": checkpoint write failed");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error(path + ": cannot open checkpoint");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof kCheckpointMagic + 8 ||
      std::memcmp(bytes.data(), kCheckpointMagic, sizeof kCheckpointMagic) !=
          0) {
    throw data_error(path + ": not a checkpoint file (bad magic)");
  }
  const std::uint64_t text_len =
      get_u64_le(bytes.data() + sizeof kCheckpointMagic);
  const std::size_t text_off = sizeof kCheckpointMagic + 8;
  if (text_off + text_len > bytes.size()) {
    throw data_error(path + ": truncated checkpoint manifest");
  }
  json manifest;
  try {
    manifest = json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(text_off),
                           bytes.begin() +
                               static_cast<std::ptrdiff_t>(text_off + text_len));
  } catch (const json::exception& e) {
    throw data_error(path + ": corrupt checkpoint manifest (" +
                     std::string(e.what()) + ")");
  }

  LoadedCheckpoint ck;
  try {
    if (manifest.at("format").get<int>() != 1) {
      throw data_error(path + ": unsupported checkpoint format version");
    }
    const json& mj = manifest.at("model");
    ck.cfg.input_height = mj.at("height").get<int>();
    ck.cfg.input_width = mj.at("width").get<int>();
    ck.cfg.depth = mj.at("depth").get<int>();
    ck.cfg.channels = mj.at("channels").get<std::vector<int>>();
    ck.cfg.bottleneck_channels = mj.at("bottleneck").get<int>();
    ck.cfg.seed = mj.at("seed").get<std::uint64_t>();
    ck.extractor_seed = manifest.at("extractor_seed").get<std::uint64_t>();
    const json& me = manifest.at("meta");
    ck.meta.epoch = me.at("epoch").get<int>();
    ck.meta.seed = me.at("seed").get<std::uint64_t>();
    ck.meta.train_loss = me.at("train_loss").get<double>();
    ck.meta.val_loss = me.at("val_loss").get<double>();
    ck.has_adam = manifest.at("adam").at("present").get<bool>();
    ck.adam_t = manifest.at("adam").at("t").get<std::int64_t>();
  } catch (const json::exception& e) {
    throw data_error(path + ": incomplete checkpoint manifest (" +
                     std::string(e.what()) + ")");
  }

  try {
    ck.cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw data_error(path + ": invalid stored model config (" +
                     std::string(e.what()) + ")");
  }
  ck.model = std::make_unique<ResUNet<float>>(ck.cfg);

  std::map<std::string, Tensor*> dest;
  for (Parameter<float>* p : ck.model->params()) {
    dest[p->name] = &p->value;
  }
  for (auto& [name, tensor] : ck.model->state_tensors()) {
    dest[name] = tensor;
  }
  const std::vector<Parameter<float>*> params = ck.model->params();
  if (ck.has_adam) {
    ck.adam_m.resize(params.size());
    ck.adam_v.resize(params.size());
  }

  const unsigned char* blob = bytes.data() + text_off + text_len;
  const std::size_t blob_len = bytes.size() - text_off - text_len;
  std::size_t filled = 0;
  const json& table = manifest.at("tensors");
  if (!table.is_array()) throw data_error(path + ": malformed tensor table");
  for (const json& entry : table) {
    std::string name;
    Shape shape;
    std::uint64_t offset = 0;
    try {
      name = entry.at("name").get<std::string>();
      if (entry.at("dtype").get<std::string>() != "f32") {
        throw data_error(path + ": unsupported dtype for tensor '" + name +
                         "'");
      }
      shape = shape_from_json(entry.at("shape"));
      offset = entry.at("offset").get<std::uint64_t>();
    } catch (const json::exception& e) {
      throw data_error(path + ": malformed tensor table entry (" +
                       std::string(e.what()) + ")");
    }
    const std::size_t count = static_cast<std::size_t>(shape.elems());
    if (offset + 4 * count > blob_len) {
      throw data_error(path + ": tensor '" + name + "' overruns the file");
    }
    std::vector<float> values = read_f32_le(blob + offset, count);

    std::vector<std::vector<float>>* adam_dest = nullptr;
    std::string pname = name;
    if (name.rfind("adam.m.", 0) == 0) {
      adam_dest = &ck.adam_m;
      pname = name.substr(7);
    } else if (name.rfind("adam.v.", 0) == 0) {
      adam_dest = &ck.adam_v;
      pname = name.substr(7);
    }
    if (adam_dest != nullptr) {
      if (!ck.has_adam) {
        throw data_error(path + ": unexpected optimizer tensor '" + name +
                         "'");
      }
      bool matched = false;
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i]->name == pname) {
          if (!(params[i]->value.shape == shape)) {
            throw data_error(path + ": shape mismatch for '" + name +
                             "': stored " + shape.str() + ", model " +
                             params[i]->value.shape.str());
          }
          (*adam_dest)[i] = std::move(values);
          matched = true;
          break;
        }
      }
      if (!matched) {
        throw data_error(path + ": optimizer tensor '" + name +
                         "' has no matching parameter");
      }
      ++filled;
      continue;
    }

    auto it = dest.find(name);
    if (it == dest.end()) {
      throw data_error(path + ": unknown tensor '" + name + "'");
    }
    if (!(it->second->shape == shape)) {
      throw data_error(path + ": shape mismatch for '" + name + "': stored " +
                       shape.str() + ", model " + it->second->shape.str());
    }
    it->second->data = std::move(values);
    dest.erase(it);
    ++filled;
  }
  if (!dest.empty()) {
    throw data_error(path + ": checkpoint is missing tensor '" +
                     dest.begin()->first + "'");
  }
  if (ck.has_adam) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (ck.adam_m[i].empty() || ck.adam_v[i].empty()) {
        throw data_error(path + ": checkpoint is missing optimizer state for '" +
                         params[i]->name + "'");
      }
    }
  }
  (void)filled;
  return ck;
}

void restore_adam(Adam<float>& adam, const LoadedCheckpoint& ck) {
  if (!ck.has_adam) {
    throw data_error("restore_adam: checkpoint has no optimizer state");
  }
  const auto& params = adam.params();
  if (params.size() != ck.adam_m.size()) {
    throw data_error("restore_adam: parameter count mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->value.data.size() != ck.adam_m[i].size() ||
        params[i]->value.data.size() != ck.adam_v[i].size()) {
      throw data_error("restore_adam: moment size mismatch for '" +
                       params[i]->name + "'");
    }
    adam.m(i) = ck.adam_m[i];
    adam.v(i) = ck.adam_v[i];
  }
  adam.set_t(ck.adam_t);
}

}  // namespace rudn
