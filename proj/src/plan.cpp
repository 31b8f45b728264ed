#include "cve/plan.hpp"

#include <set>

#include "cve/error.hpp"
#include "cve/io.hpp"

namespace cve {

using nlohmann::json;

void ModelManifest::validate() const {
  if (layer_names.empty()) throw InvalidArgument("manifest has no layers");
  if (embedding_name.empty()) throw InvalidArgument("manifest has no embedding name");
  if (!tied && head_name.empty()) throw InvalidArgument("untied manifest has no head name");
  if (hidden_dim == 0 || vocab_size == 0) throw InvalidArgument("manifest sizes must be positive");
  std::set<std::string> linears;
  for (const auto& l : linear_names_per_layer) {
    if (l.empty()) throw InvalidArgument("empty linear sublayer name");
    if (!linears.insert(l).second) throw InvalidArgument("duplicate linear sublayer name '" + l + "'");
  }
  std::set<std::string> seen;
  for (const auto& id : identifiers()) {
    if (id.empty()) throw InvalidArgument("empty layer name");
    if (!seen.insert(id).second) throw InvalidArgument("duplicate identifier '" + id + "'");
  }
}

std::string ModelManifest::linear_id(std::size_t layer, std::size_t linear) const {
  return layer_names.at(layer) + "." + linear_names_per_layer.at(linear);
}

std::vector<std::string> ModelManifest::identifiers() const {
  std::vector<std::string> out = {embedding_name};
  if (!tied) out.push_back(head_name);
  for (std::size_t i = 0; i < layer_names.size(); ++i) {
    out.push_back(layer_names[i]);
    for (std::size_t j = 0; j < linear_names_per_layer.size(); ++j) out.push_back(linear_id(i, j));
  }
  return out;
}

ModelManifest llama_manifest(std::size_t n_layers, std::size_t hidden_dim, std::size_t vocab_size, bool tied) {
  ModelManifest m;
  for (std::size_t i = 0; i < n_layers; ++i) m.layer_names.push_back("model.layers." + std::to_string(i));
  m.linear_names_per_layer = {"self_attn.q_proj", "self_attn.k_proj", "self_attn.v_proj", "self_attn.o_proj",
                              "mlp.gate_proj",    "mlp.up_proj",      "mlp.down_proj"};
  m.embedding_name = "model.embed_tokens";
  m.head_name = tied ? "" : "lm_head";
  m.tied = tied;
  m.hidden_dim = hidden_dim;
  m.vocab_size = vocab_size;
  return m;
}

json manifest_to_json(const ModelManifest& m) {
  return {{"format_version", kFormatVersion},
          {"layer_names", m.layer_names},
          {"linear_names_per_layer", m.linear_names_per_layer},
          {"embedding_name", m.embedding_name},
          {"head_name", m.head_name},
          {"tied", m.tied},
          {"hidden_dim", m.hidden_dim},
          {"vocab_size", m.vocab_size}};
}

ModelManifest manifest_from_json(const json& j) {
  ModelManifest m;
  try {
    check_format_version(j, "manifest");
    m.layer_names = j.at("layer_names").get<std::vector<std::string>>();
    m.linear_names_per_layer = j.at("linear_names_per_layer").get<std::vector<std::string>>();
    m.embedding_name = j.at("embedding_name").get<std::string>();
    m.tied = j.at("tied").get<bool>();
    m.head_name = j.value("head_name", std::string());
    m.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    m.vocab_size = j.at("vocab_size").get<std::size_t>();
    m.validate();
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  return m;
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::LoRA: return "lora";
    case Strategy::TwoStage: return "two-stage";
    case Strategy::TwoByTwoLS: return "2x2ls";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& s) {
  for (auto v : {Strategy::LoRA, Strategy::TwoStage, Strategy::TwoByTwoLS}) {
    if (s == to_string(v)) return v;
  }
  throw InvalidArgument("unknown strategy '" + s + "' (expected lora|two-stage|2x2ls)");
}

namespace {

std::vector<std::string> embed_and_head(const ModelManifest& m) {
  std::vector<std::string> out = {m.embedding_name};
  if (!m.tied) out.push_back(m.head_name);
  return out;
}

Phase lora_phase(const ModelManifest& m, const AdapterSpec& spec) {
  Phase p{"lora", embed_and_head(m), spec};
  p.adapters->targets.clear();
  for (std::size_t i = 0; i < m.layer_names.size(); ++i)
    for (std::size_t j = 0; j < m.linear_names_per_layer.size(); ++j) p.adapters->targets.push_back(m.linear_id(i, j));
  return p;
}

}  // namespace

TrainPlan make_plan(const ModelManifest& manifest, Strategy strategy, const PlanOptions& options) {
  manifest.validate();
  if (options.seq_len == 0) throw InvalidArgument("seq_len must be positive");
  if (options.objective.kind == Objective::Kind::MTP && options.objective.n_heads < 2) {
    throw InvalidArgument("MTP needs at least one extra head");
  }
  if (options.objective.kind == Objective::Kind::CLM && options.objective.n_heads != 1) {
    throw InvalidArgument("CLM uses exactly one head");
  }
  if (options.train_rows_from && *options.train_rows_from >= manifest.vocab_size) {
    throw InvalidArgument("train_rows_from is past the end of the vocabulary");
  }

  TrainPlan plan;
  plan.strategy = strategy;
  plan.objective = options.objective;
  plan.seq_len = options.seq_len;
  plan.hyper = options.hyper;
  plan.train_rows_from = options.train_rows_from;
  plan.vocab_size = manifest.vocab_size;

  const std::size_t n = manifest.layer_names.size();
  switch (strategy) {
    case Strategy::LoRA:
      plan.phases.push_back(lora_phase(manifest, options.adapter));
      break;
    case Strategy::TwoStage:
      plan.phases.push_back({"embeddings", embed_and_head(manifest), std::nullopt});
      plan.phases.push_back(lora_phase(manifest, options.adapter));
      break;
    case Strategy::TwoByTwoLS: {
      Phase p{"2x2ls", embed_and_head(manifest), std::nullopt};
      std::set<std::size_t> layers;
      for (std::size_t i : {std::size_t{0}, std::size_t{1}}) {
        if (i < n) layers.insert(i);
        if (i < n) layers.insert(n - 1 - i);
      }
      for (auto i : layers) p.trainable.push_back(manifest.layer_names[i]);
      if (n < 4) {
        plan.warnings.push_back("only " + std::to_string(n) + " layers: every layer is trained");
      }
      plan.phases.push_back(std::move(p));
      break;
    }
  }

  if (plan.objective.kind == Objective::Kind::MTP) {
    const auto& source = manifest.tied ? manifest.embedding_name : manifest.head_name;
    for (unsigned h = 1; h < plan.objective.n_heads; ++h) {
      ExtraParameter e{"mtp_head." + std::to_string(h), manifest.vocab_size, manifest.hidden_dim, source};
      for (auto& p : plan.phases) p.trainable.push_back(e.name);
      plan.extra_parameters.push_back(std::move(e));
    }
  }
  return plan;
}

std::vector<std::string> check_plan(const TrainPlan& plan, const ModelManifest& manifest) {
  std::vector<std::string> problems;
  std::set<std::string> known;
  for (const auto& id : manifest.identifiers()) known.insert(id);
  for (const auto& e : plan.extra_parameters) {
    if (!known.insert(e.name).second) problems.push_back("extra parameter '" + e.name + "' shadows an existing name");
    if (!known.count(e.init_from)) problems.push_back("extra parameter '" + e.name + "' copies an unknown parameter");
  }
  if (plan.phases.empty()) problems.push_back("plan has no phases");
  for (const auto& p : plan.phases) {
    if (p.trainable.empty() && !p.adapters) problems.push_back("phase '" + p.name + "' trains nothing");
    std::set<std::string> seen;
    auto check = [&](const std::string& id, const char* what) {
      if (!known.count(id)) problems.push_back("phase '" + p.name + "': unknown " + what + " '" + id + "'");
      if (!seen.insert(id).second) problems.push_back("phase '" + p.name + "': '" + id + "' listed twice");
    };
    for (const auto& id : p.trainable) check(id, "parameter");
    if (p.adapters) {
      if (p.adapters->rank == 0) problems.push_back("phase '" + p.name + "': adapter rank 0");
      if (!(p.adapters->dropout >= 0 && p.adapters->dropout < 1)) {
        problems.push_back("phase '" + p.name + "': adapter dropout outside [0, 1)");
      }
      if (p.adapters->targets.empty()) problems.push_back("phase '" + p.name + "': adapters without targets");
      for (const auto& id : p.adapters->targets) check(id, "adapter target");
    }
  }
  if (plan.seq_len == 0) problems.push_back("seq_len is zero");
  if (plan.objective.kind == Objective::Kind::MTP && plan.extra_parameters.size() + 1 != plan.objective.n_heads) {
    problems.push_back("MTP head count does not match the extra parameters");
  }
  return problems;
}

json plan_to_json(const TrainPlan& plan) {
  json phases = json::array();
  for (const auto& p : plan.phases) {
    json jp{{"name", p.name}, {"trainable", p.trainable}, {"adapters", nullptr}};
    if (p.adapters) {
      jp["adapters"] = {{"rank", p.adapters->rank},
                        {"alpha", p.adapters->alpha},
                        {"dropout", p.adapters->dropout},
                        {"targets", p.adapters->targets}};
    }
    phases.push_back(std::move(jp));
  }
  json extra = json::array();
  for (const auto& e : plan.extra_parameters) {
    extra.push_back({{"name", e.name}, {"shape", {e.rows, e.cols}}, {"init_from", e.init_from}});
  }
  json j{{"format_version", kFormatVersion},
         {"strategy", to_string(plan.strategy)},
         {"phases", std::move(phases)},
         {"objective", plan.objective.kind == Objective::Kind::MTP ? "mtp" : "clm"},
         {"n_heads", plan.objective.n_heads},
         {"seq_len", plan.seq_len},
         {"extra_parameters", std::move(extra)},
         {"embedding_rows", plan.train_rows_from ? json{{"from", *plan.train_rows_from}, {"to", plan.vocab_size}}
                                                 : json("all")},
         {"hyperparameters",
          {{"batch_size", plan.hyper.batch_size},
           {"learning_rate", plan.hyper.learning_rate},
           {"schedule", plan.hyper.schedule},
           {"warmup_steps", plan.hyper.warmup_steps},
           {"weight_decay", plan.hyper.weight_decay},
           {"epochs", plan.hyper.epochs}}},
         {"warnings", plan.warnings}};
  return j;
}

std::vector<EmbeddingMatrix> init_mtp_heads(const EmbeddingMatrix& head, std::size_t n_extra) {
  if (n_extra < 1) throw InvalidArgument("need at least one extra head");
  if (head.role() != MatrixRole::LmHead) throw InvalidArgument("MTP heads are copied from an lm_head matrix");
  return std::vector<EmbeddingMatrix>(n_extra, head);
}

PackingStats pack_corpus(std::uint64_t total_tokens, std::uint64_t seq_len, std::uint64_t batch_size) {
  if (seq_len == 0) throw InvalidArgument("seq_len must be positive");
  if (batch_size == 0) throw InvalidArgument("batch size must be positive");
  PackingStats p;
  p.total_tokens = total_tokens;
  p.seq_len = seq_len;
  p.batch_size = batch_size;
  p.num_sequences = total_tokens / seq_len + (total_tokens % seq_len != 0);
  p.num_optimizer_steps = p.num_sequences / batch_size + (p.num_sequences % batch_size != 0);
  p.padding_tokens = p.num_sequences * seq_len - total_tokens;
  return p;
}

json packing_to_json(const PackingStats& p) {
  return {{"total_tokens", p.total_tokens},   {"seq_len", p.seq_len},
          {"batch_size", p.batch_size},       {"num_sequences", p.num_sequences},
          {"num_optimizer_steps", p.num_optimizer_steps}, {"padding_tokens", p.padding_tokens}};
}

}  // namespace cve
