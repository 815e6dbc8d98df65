#include "hrl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "hrl/errors.hpp"

namespace hrl {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError("config: bad numeric value '" + v + "' for key '" + key + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError("config: bad integer value '" + v + "' for key '" + key + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError("config: bad boolean value '" + v + "' for key '" + key + "'");
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "d") d = static_cast<int>(parse_int(key, v));
  else if (key == "num_classes") num_classes = static_cast<int>(parse_int(key, v));
  else if (key == "gamma") gamma = parse_double(key, v);
  else if (key == "lambda1") lambda1 = parse_double(key, v);
  else if (key == "lambda2") lambda2 = parse_double(key, v);
  else if (key == "lambda3") lambda3 = parse_double(key, v);
  else if (key == "lambda_low1") lambda_low1 = parse_double(key, v);
  else if (key == "lambda_low2") lambda_low2 = parse_double(key, v);
  else if (key == "adam_lr") adam_lr = parse_double(key, v);
  else if (key == "sgd_lr") sgd_lr = parse_double(key, v);
  else if (key == "batch_size") batch_size = static_cast<int>(parse_int(key, v));
  else if (key == "l2_weight") l2_weight = parse_double(key, v);
  else if (key == "dropout") dropout = parse_double(key, v);
  else if (key == "grad_clip") grad_clip = parse_double(key, v);
  else if (key == "baseline_samples") baseline_samples = static_cast<int>(parse_int(key, v));
  else if (key == "pretrain_epochs") pretrain_epochs = static_cast<int>(parse_int(key, v));
  else if (key == "policy_epochs") policy_epochs = static_cast<int>(parse_int(key, v));
  else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(key, v));
  else if (key == "aspect_embeddings_trainable") aspect_embeddings_trainable = parse_bool(key, v);
  else if (key == "reset_low_state_per_clause") reset_low_state_per_clause = parse_bool(key, v);
  else if (key == "finetune_interleaved") finetune_interleaved = parse_bool(key, v);
  else if (key == "greedy_decode") greedy_decode = parse_bool(key, v);
  else if (key == "threads") threads = static_cast<int>(parse_int(key, v));
  else if (key == "kernel_backend") kernel_backend = v;
  else if (key == "connectives") connectives = v;
  else throw UsageError("config: unknown key '" + key + "'");
}

Config Config::from_text(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

std::string Config::to_text() const {
  std::ostringstream os;
  os << "d = " << d << "\n";
  os << "num_classes = " << num_classes << "\n";
  os << "gamma = " << fmt_double(gamma) << "\n";
  os << "lambda1 = " << fmt_double(lambda1) << "\n";
  os << "lambda2 = " << fmt_double(lambda2) << "\n";
  os << "lambda3 = " << fmt_double(lambda3) << "\n";
  os << "lambda_low1 = " << fmt_double(lambda_low1) << "\n";
  os << "lambda_low2 = " << fmt_double(lambda_low2) << "\n";
  os << "adam_lr = " << fmt_double(adam_lr) << "\n";
  os << "sgd_lr = " << fmt_double(sgd_lr) << "\n";
  os << "batch_size = " << batch_size << "\n";
  os << "l2_weight = " << fmt_double(l2_weight) << "\n";
  os << "dropout = " << fmt_double(dropout) << "\n";
  os << "grad_clip = " << fmt_double(grad_clip) << "\n";
  os << "baseline_samples = " << baseline_samples << "\n";
  os << "pretrain_epochs = " << pretrain_epochs << "\n";
  os << "policy_epochs = " << policy_epochs << "\n";
  os << "seed = " << seed << "\n";
  os << "aspect_embeddings_trainable = " << (aspect_embeddings_trainable ? "true" : "false") << "\n";
  os << "reset_low_state_per_clause = " << (reset_low_state_per_clause ? "true" : "false") << "\n";
  os << "finetune_interleaved = " << (finetune_interleaved ? "true" : "false") << "\n";
  os << "greedy_decode = " << (greedy_decode ? "true" : "false") << "\n";
  os << "threads = " << threads << "\n";
  os << "kernel_backend = " << kernel_backend << "\n";
  os << "connectives = " << connectives << "\n";
  return os.str();
}

void Config::validate() const {
  auto fail = [](const std::string& msg) { throw UsageError("config: " + msg); };
  if (d <= 0) fail("d must be positive");
  if (num_classes < 2) fail("num_classes must be >= 2");
  if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must lie in (0, 1]");
  for (double w : {lambda1, lambda2, lambda3, lambda_low1, lambda_low2}) {
    if (w < 0.0 || !std::isfinite(w)) fail("reward weights must be finite and >= 0");
  }
  if (batch_size <= 0) fail("batch_size must be positive");
  if (baseline_samples < 1) fail("baseline_samples must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) fail("dropout must lie in [0, 1)");
  if (threads < 1) fail("threads must be >= 1");
  if (pretrain_epochs < 0 || policy_epochs < 0) fail("epoch counts must be >= 0");
  if (kernel_backend != "auto" && kernel_backend != "scalar" && kernel_backend != "avx2") {
    fail("kernel_backend must be auto|scalar|avx2");
  }
}

std::vector<std::string> Config::connective_list() const {
  std::vector<std::string> out;
  std::string cur;
  for (char c : connectives) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace hrl
