#include "hrl/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <span>

#include "hrl/errors.hpp"

namespace hrl {

namespace {

constexpr char kMagic[8] = {'H', 'R', 'L', 'C', 'K', 'P', 'T', '\n'};
constexpr std::uint32_t kVersion = 1;

void write_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u8(std::ostream& os, std::uint8_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_string(std::ostream& os, const std::string& s) {
  write_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void write_reals(std::ostream& os, std::span<const real> v) {
  write_u64(os, v.size());
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(real)));
}

std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

std::uint8_t read_u8(std::istream& is) {
  std::uint8_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

std::string read_string(std::istream& is) {
  const std::uint64_t n = read_u64(is);
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  return s;
}

std::vector<real> read_reals(std::istream& is) {
  const std::uint64_t n = read_u64(is);
  std::vector<real> v(n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(real)));
  return v;
}

}  // namespace

Model Model::create(const Config& cfg, const Vocab& vocab,
                    const std::vector<AspectInfo>& aspect_infos) {
  cfg.validate();
  Model m;
  m.cfg = cfg;
  m.vocab = vocab;
  m.rng = Rng(mix_seed(cfg.seed));
  const size_t d = static_cast<size_t>(cfg.d);
  const size_t c = static_cast<size_t>(cfg.num_classes);

  // Fixed creation order; it defines the checkpoint layout and the draw
  // sequence from the run stream.
  m.emb = m.reg.add_matrix("embeddings", m.vocab.size(), d, /*l2=*/false);
  embeddings::init_random(m.reg.at(m.emb).value, m.rng);

  m.lstm_low = lstm::create(m.reg, "lstm_low", d, d, m.rng);
  m.lstm_high = lstm::create(m.reg, "lstm_high", d, d, m.rng);

  m.dec.num_classes = cfg.num_classes;
  m.dec.w = m.reg.add_matrix("decoder.w", c, 2 * d);
  m.dec.b = m.reg.add_vector("decoder.b", c);
  m.dec.cw = m.reg.add_matrix("decoder.cw", c, d);
  m.dec.cb = m.reg.add_vector("decoder.cb", c);
  const double bound_final = 1.0 / std::sqrt(static_cast<double>(2 * d));
  const double bound_clause = 1.0 / std::sqrt(static_cast<double>(d));
  for (real& v : m.reg.at(m.dec.w).value) v = static_cast<real>(m.rng.uniform(-bound_final, bound_final));
  for (real& v : m.reg.at(m.dec.cw).value) v = static_cast<real>(m.rng.uniform(-bound_clause, bound_clause));

  m.high_policy.w = Vector(4 * d);
  for (size_t i = 0; i < 4 * d; ++i) m.high_policy.w[i] = static_cast<real>(m.rng.uniform(-0.1, 0.1));
  m.low_policy.w = Vector(3 * d);
  for (size_t i = 0; i < 3 * d; ++i) m.low_policy.w[i] = static_cast<real>(m.rng.uniform(-0.1, 0.1));

  for (const auto& info : aspect_infos) {
    AspectSpec spec;
    spec.name = info.name;
    spec.keywords = info.keywords;
    if (spec.keywords.empty()) {
      throw DomainError("aspect '" + info.name + "' has an empty keyword list");
    }
    for (const auto& kw : spec.keywords) spec.keyword_ids.push_back(m.vocab.id(kw));
    spec.embedding = embeddings::aspect_embedding(m.reg, m.emb, spec.keyword_ids);
    m.aspects.push_back(std::move(spec));
  }
  return m;
}

void Model::recompute_aspect_embeddings() {
  for (auto& a : aspects) {
    a.embedding = embeddings::aspect_embedding(reg, emb, a.keyword_ids);
  }
}

Vector Model::clause_vector(const Clause& clause) const {
  if (clause.token_ids.empty()) throw DomainError("clause_vector: empty clause");
  LstmState state(static_cast<size_t>(cfg.d));
  for (int tok : clause.token_ids) {
    state = lstm::step(reg, lstm_low, state, embedding_of(tok));
  }
  return state.h;
}

void Model::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("checkpoint: cannot write '" + path + "'");
  os.write(kMagic, sizeof(kMagic));
  write_u32(os, kVersion);
  write_string(os, cfg.to_text());

  write_u64(os, vocab.size());
  for (const auto& tok : vocab.tokens()) write_string(os, tok);

  write_u64(os, aspects.size());
  for (const auto& a : aspects) {
    write_string(os, a.name);
    write_u64(os, a.keywords.size());
    for (const auto& kw : a.keywords) write_string(os, kw);
    write_reals(os, a.embedding.span());
  }

  write_u64(os, reg.count());
  for (size_t i = 0; i < reg.count(); ++i) {
    const auto& e = reg.at(static_cast<ParamId>(i));
    write_string(os, e.name);
    write_u64(os, e.rows);
    write_u64(os, e.cols);
    write_u8(os, e.l2 ? 1 : 0);
    write_reals(os, e.value);
  }

  write_reals(os, high_policy.w.span());
  write_reals(os, std::span<const real>(&high_policy.b, 1));
  write_reals(os, low_policy.w.span());
  write_reals(os, std::span<const real>(&low_policy.b, 1));

  write_u8(os, pretrained_low ? 1 : 0);
  write_u8(os, pretrained_high ? 1 : 0);
  write_u8(os, policies_trained ? 1 : 0);
  write_u32(os, static_cast<std::uint32_t>(pretrain_epochs_done));
  write_u32(os, static_cast<std::uint32_t>(policy_epochs_done));
  write_string(os, rng.serialize_state());
  if (!os) throw FormatError("checkpoint: write failed for '" + path + "'");
}

Model Model::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("checkpoint: cannot open '" + path + "'");
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("checkpoint '" + path + "': bad magic");
  }
  const std::uint32_t version = read_u32(is);
  if (version != kVersion) {
    throw FormatError("checkpoint '" + path + "': unsupported version " +
                      std::to_string(version));
  }
  const Config cfg = Config::from_text(read_string(is));

  Vocab vocab;
  const std::uint64_t vocab_size = read_u64(is);
  for (std::uint64_t i = 0; i < vocab_size; ++i) {
    const std::string tok = read_string(is);
    if (i == 0) {
      if (tok != Vocab::unknown_token()) {
        throw FormatError("checkpoint '" + path + "': vocab does not start with the unknown token");
      }
      continue;  // constructor already added it
    }
    vocab.add(tok);
  }

  std::vector<AspectInfo> infos;
  std::vector<Vector> stored_va;
  const std::uint64_t aspect_count = read_u64(is);
  for (std::uint64_t i = 0; i < aspect_count; ++i) {
    AspectInfo info;
    info.name = read_string(is);
    const std::uint64_t kw = read_u64(is);
    for (std::uint64_t k = 0; k < kw; ++k) info.keywords.push_back(read_string(is));
    const auto va = read_reals(is);
    Vector v(va.size());
    std::memcpy(v.data(), va.data(), va.size() * sizeof(real));
    infos.push_back(std::move(info));
    stored_va.push_back(std::move(v));
  }

  Model m = Model::create(cfg, vocab, infos);
  for (size_t i = 0; i < m.aspects.size(); ++i) m.aspects[i].embedding = stored_va[i];

  const std::uint64_t param_count = read_u64(is);
  if (param_count != m.reg.count()) {
    throw FormatError("checkpoint '" + path + "': expected " + std::to_string(m.reg.count()) +
                      " parameter tensors, found " + std::to_string(param_count));
  }
  for (std::uint64_t i = 0; i < param_count; ++i) {
    auto& e = m.reg.at(static_cast<ParamId>(i));
    const std::string name = read_string(is);
    const std::uint64_t rows = read_u64(is);
    const std::uint64_t cols = read_u64(is);
    const bool l2 = read_u8(is) != 0;
    auto value = read_reals(is);
    if (name != e.name || rows != e.rows || cols != e.cols || l2 != e.l2 ||
        value.size() != e.value.size()) {
      throw FormatError("checkpoint '" + path + "': parameter '" + name +
                        "' does not match the model layout (dimension mismatch)");
    }
    e.value = std::move(value);
  }

  {
    auto w = read_reals(is);
    if (w.size() != m.high_policy.w.size()) {
      throw FormatError("checkpoint '" + path + "': high policy dimension mismatch");
    }
    std::memcpy(m.high_policy.w.data(), w.data(), w.size() * sizeof(real));
    m.high_policy.b = read_reals(is).at(0);
  }
  {
    auto w = read_reals(is);
    if (w.size() != m.low_policy.w.size()) {
      throw FormatError("checkpoint '" + path + "': low policy dimension mismatch");
    }
    std::memcpy(m.low_policy.w.data(), w.data(), w.size() * sizeof(real));
    m.low_policy.b = read_reals(is).at(0);
  }

  m.pretrained_low = read_u8(is) != 0;
  m.pretrained_high = read_u8(is) != 0;
  m.policies_trained = read_u8(is) != 0;
  m.pretrain_epochs_done = static_cast<int>(read_u32(is));
  m.policy_epochs_done = static_cast<int>(read_u32(is));
  m.rng.restore_state(read_string(is));
  if (!is) throw FormatError("checkpoint '" + path + "': truncated file");
  return m;
}

std::string Model::theta_fingerprint() const {
  std::string bytes;
  for (size_t i = 0; i < reg.count(); ++i) {
    const auto& e = reg.at(static_cast<ParamId>(i));
    bytes.append(reinterpret_cast<const char*>(e.value.data()), e.value.size() * sizeof(real));
  }
  return bytes;
}

}  // namespace hrl
