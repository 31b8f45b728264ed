#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cve/embedding.hpp"

namespace cve {

// Names of a decoder-only model's trainable parameter groups.
struct ModelManifest {
  std::vector<std::string> layer_names;             // bottom (index 0) to top
  std::vector<std::string> linear_names_per_layer;  // relative to a layer name
  std::string embedding_name;
  std::string head_name;  // unused when tied
  bool tied = false;
  std::size_t hidden_dim = 0;
  std::size_t vocab_size = 0;

  // Throws InvalidArgument: no layers, empty or duplicate identifiers, zero sizes.
  void validate() const;
  // "<layer>.<linear>"
  std::string linear_id(std::size_t layer, std::size_t linear) const;
  // Every identifier a plan may reference: embedding, head (untied), layers, linears.
  std::vector<std::string> identifiers() const;
};

// A Llama-style manifest: model.layers.<i>, seven projections per layer.
ModelManifest llama_manifest(std::size_t n_layers, std::size_t hidden_dim, std::size_t vocab_size, bool tied);

nlohmann::json manifest_to_json(const ModelManifest& m);
ModelManifest manifest_from_json(const nlohmann::json& j);  // throws FormatError

enum class Strategy { LoRA, TwoStage, TwoByTwoLS };
std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);  // lora | two-stage | 2x2ls

struct Objective {
  enum class Kind { CLM, MTP };
  Kind kind = Kind::CLM;
  unsigned n_heads = 1;  // total prediction heads; MTP has at least 2

  static Objective clm() { return {}; }
  static Objective mtp(unsigned n_heads = 2) { return {Kind::MTP, n_heads}; }
};

struct AdapterSpec {
  unsigned rank = 8;
  double alpha = 32;
  double dropout = 0.05;
  std::vector<std::string> targets;
};

struct Phase {
  std::string name;
  std::vector<std::string> trainable;  // fully trained parameter groups
  std::optional<AdapterSpec> adapters;
};

// Parameters the plan introduces that the manifest does not have.
struct ExtraParameter {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string init_from;  // parameter whose values are copied at creation
};

// Emitted as metadata for the training harness; nothing here trains.
struct Hyperparameters {
  unsigned batch_size = 8;
  double learning_rate = 1e-4;
  std::string schedule = "cosine";
  unsigned warmup_steps = 100;
  double weight_decay = 0.01;
  unsigned epochs = 2;
};

struct PlanOptions {
  Objective objective;
  unsigned seq_len = 2048;
  Hyperparameters hyper;
  AdapterSpec adapter;  // targets are filled in by make_plan
  // When set, only embedding/head rows >= this id are trained.
  std::optional<std::size_t> train_rows_from;
};

struct TrainPlan {
  Strategy strategy = Strategy::LoRA;
  std::vector<Phase> phases;
  Objective objective;
  unsigned seq_len = 2048;
  Hyperparameters hyper;
  std::vector<ExtraParameter> extra_parameters;
  std::optional<std::size_t> train_rows_from;
  std::size_t vocab_size = 0;
  std::vector<std::string> warnings;
};

// LoRA: one phase, adapters on every linear sublayer, embedding and head
// trained in full. TwoStage: embedding + head alone, then the LoRA phase.
// 2x2 LS: one phase training whole layers {0, 1, n-2, n-1} plus embedding
// and head, no adapters. Throws InvalidArgument on an invalid manifest or
// objective.
TrainPlan make_plan(const ModelManifest& manifest, Strategy strategy, const PlanOptions& options = {});

// Problems found: unknown identifiers, repeats within a phase, empty phases,
// invalid adapter or objective settings. Empty when the plan is sound.
std::vector<std::string> check_plan(const TrainPlan& plan, const ModelManifest& manifest);

nlohmann::json plan_to_json(const TrainPlan& plan);

// Independent copies of an lm_head matrix for the extra MTP heads.
std::vector<EmbeddingMatrix> init_mtp_heads(const EmbeddingMatrix& head, std::size_t n_extra);

struct PackingStats {
  std::uint64_t total_tokens = 0;
  std::uint64_t seq_len = 0;
  std::uint64_t batch_size = 0;
  std::uint64_t num_sequences = 0;        // ceil(total / seq_len)
  std::uint64_t num_optimizer_steps = 0;  // ceil(sequences / batch), per epoch
  std::uint64_t padding_tokens = 0;       // fill of the last sequence
};

// Concatenate-and-chunk; the short final chunk is kept and padded.
PackingStats pack_corpus(std::uint64_t total_tokens, std::uint64_t seq_len, std::uint64_t batch_size);
nlohmann::json packing_to_json(const PackingStats& p);

}  // namespace cve
