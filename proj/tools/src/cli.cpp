#include "sta_cli/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "sta/error.hpp"
#include "sta/evaluate.hpp"
#include "sta/experiments.hpp"
#include "sta/model_io.hpp"
#include "sta/recommend.hpp"
#include "sta/rng.hpp"
#include "sta/vocab.hpp"

namespace sta::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

constexpr std::array<std::string_view, 32> kKeys = {
    "input",          "content_file",    "region_file",    "output",       "model",
    "format",         "delimiter",       "time_scheme",    "utc_offset",   "regions",
    "train_fraction", "valid_fraction",  "reduction",      "seed",         "variant",
    "dims",           "dim",             "rel_dim",        "epochs",       "batch",
    "margin",         "lr",              "sampling",       "negatives",    "checkpoint_every",
    "content",        "pair_budget",     "cold_threshold", "ks",           "sweep_dims",
    "sparsity_ratios", "k"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string_view rest = s;
  if (!rest.empty() && rest.front() == '[' && rest.back() == ']') rest = rest.substr(1, rest.size() - 2);
  while (true) {
    const auto comma = rest.find(',');
    std::string item = trim(rest.substr(0, comma));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("invalid value for " + std::string(key) + ": '" + s + "'");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string s = lowercase(trim(text));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("invalid boolean for " + std::string(key) + ": '" + s + "'");
}

template <typename T>
std::vector<T> parse_numbers(std::string_view key, std::string_view text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<T>(key, item));
  if (out.empty()) throw ConfigError("empty list for " + std::string(key));
  return out;
}

template <typename T>
T parse_positive(std::string_view key, std::string_view text) {
  const T v = parse_number<T>(key, text);
  if (!(v > 0)) throw ConfigError(std::string(key) + " must be positive");
  return v;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::trunc) {
  std::ofstream out(path, std::ios::binary | std::ios::out | mode);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void require_file(const fs::path& path) {
  if (!fs::exists(path)) throw MissingInputError(path.string());
}

void write_file(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

fs::path RunConfig::model_path() const { return model.empty() ? output / "model.sta" : model; }

PipelineSettings RunConfig::pipeline() const {
  PipelineSettings s;
  s.discretizer.time_scheme = time_scheme;
  s.discretizer.utc_offset_seconds = utc_offset_seconds;
  s.discretizer.space_scheme = region_file.empty() ? SpaceScheme::kKMeans : SpaceScheme::kRegionFile;
  s.discretizer.num_regions = regions;
  s.discretizer.region_file = region_file;
  s.discretizer.seed = derive_seed(seed, "discretizer");
  s.split.train_fraction = train_fraction;
  s.split.valid_fraction = valid_fraction;
  s.split.reduction = reduction;
  s.split.seed = derive_seed(seed, "split");
  s.content = content;
  s.content_options.pair_budget = pair_budget;
  s.content_options.seed = derive_seed(seed, "content");
  return s;
}

TrainConfig RunConfig::training() const {
  TrainConfig c = train;
  c.seed = derive_seed(seed, "train");
  return c;
}

ParseOptions RunConfig::parse_options() const {
  ParseOptions o;
  o.format = FieldOrder::parse(format);
  o.delimiter = delimiter;
  return o;
}

std::span<const std::string_view> config_keys() { return kKeys; }

void apply_setting(RunConfig& c, std::string_view key_in, std::string_view value_in) {
  const std::string key = trim(key_in);
  std::string value = trim(value_in);
  if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
      value.back() == value.front()) {
    value = value.substr(1, value.size() - 2);
  }
  const std::string_view k = key;
  const std::string_view v = value;

  if (k == "input") {
    c.input = value;
  } else if (k == "content_file") {
    c.content_file = value;
  } else if (k == "region_file") {
    c.region_file = value;
  } else if (k == "output") {
    c.output = value;
  } else if (k == "model") {
    c.model = value;
  } else if (k == "format") {
    c.format = value;
  } else if (k == "delimiter") {
    if (value == "\\t" || value == "tab") {
      c.delimiter = '\t';
    } else if (value.size() == 1) {
      c.delimiter = value[0];
    } else {
      throw ConfigError("delimiter must be a single character");
    }
  } else if (k == "time_scheme") {
    c.time_scheme = parse_time_scheme(v);
  } else if (k == "utc_offset") {
    c.utc_offset_seconds = parse_number<std::int64_t>(k, v);
  } else if (k == "regions") {
    c.regions = parse_positive<int>(k, v);
  } else if (k == "train_fraction") {
    c.train_fraction = parse_number<double>(k, v);
  } else if (k == "valid_fraction") {
    c.valid_fraction = parse_number<double>(k, v);
  } else if (k == "reduction") {
    c.reduction = parse_number<double>(k, v);
  } else if (k == "seed") {
    c.seed = parse_number<std::uint64_t>(k, v);
  } else if (k == "variant") {
    c.train.variant = parse_variant(v);
  } else if (k == "dims") {
    const auto dims = parse_numbers<int>(k, v);
    if (dims.size() > 2) throw ConfigError("dims takes d or d,m");
    c.train.dim = dims[0];
    c.train.rel_dim = dims.size() == 2 ? dims[1] : dims[0];
  } else if (k == "dim") {
    c.train.dim = parse_positive<int>(k, v);
  } else if (k == "rel_dim") {
    c.train.rel_dim = parse_positive<int>(k, v);
  } else if (k == "epochs") {
    c.train.epochs = parse_positive<int>(k, v);
  } else if (k == "batch") {
    c.train.batch_size = parse_positive<std::size_t>(k, v);
  } else if (k == "margin") {
    c.train.margin = parse_number<double>(k, v);
  } else if (k == "lr") {
    c.train.learning_rate = parse_positive<double>(k, v);
  } else if (k == "sampling") {
    c.train.sampling = parse_sampling(v);
  } else if (k == "negatives") {
    c.train.negatives = parse_positive<int>(k, v);
  } else if (k == "checkpoint_every") {
    c.checkpoint_every = parse_positive<int>(k, v);
  } else if (k == "content") {
    c.content = parse_bool(k, v);
  } else if (k == "pair_budget") {
    c.pair_budget = parse_positive<std::size_t>(k, v);
  } else if (k == "cold_threshold") {
    c.cold_threshold = parse_positive<int>(k, v);
  } else if (k == "ks") {
    c.ks = parse_numbers<int>(k, v);
  } else if (k == "k") {
    c.k = parse_positive<std::size_t>(k, v);
  } else if (k == "sweep_dims") {
    c.sweep_dims = parse_numbers<int>(k, v);
  } else if (k == "sparsity_ratios") {
    c.sparsity_ratios = parse_numbers<double>(k, v);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

void load_config_file(RunConfig& config, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty()) {
      throw ConfigError(path.string() + ": sections are not supported (" + item.fullname() + ")");
    }
    std::string joined;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) {
      if (i > 0) joined += ',';
      joined += item.inputs[i];
    }
    apply_setting(config, item.name, joined);
  }
}

void cmd_preprocess(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.input.empty()) throw UsageError("preprocess needs an input file (--input)");
  auto parsed = read_checkins(config.input, config.parse_options());
  for (const auto& w : parsed.warnings) err << "warning: " << w << '\n';
  if (!config.content_file.empty()) {
    require_file(config.content_file);
    merge_poi_content(parsed.checkins, config.content_file);
  }
  const PreparedData data = prepare(parsed.checkins, config.pipeline());
  for (const auto& w : data.split.warnings) err << "warning: " << w << '\n';

  fs::create_directories(config.output);
  data.vocab.save(config.output / "vocab.tsv");
  data.train.save(config.output / "triples.tsv");
  data.split.save(config.output / "split.tsv");
  data.stats.save(config.output / "stats.tsv");
  data.disc.save(config.output / "discretizer.tsv");
  save_queries(config.output / "test.tsv", data.test, data.test_how);
  save_queries(config.output / "valid.tsv", data.validation, data.validation_how);
  if (config.content) {
    data.content.save(config.output / "content.tsv");
  } else {
    fs::remove(config.output / "content.tsv");
  }

  std::ifstream stats(config.output / "stats.tsv");
  out << stats.rdbuf();
  const auto& r = data.test_resolution;
  err << "test queries: " << r.exact << " exact, " << r.nearest_region << " nearest-region, "
      << r.same_region << " same-region fallback, " << r.unanswerable << " unanswerable\n";
}

void cmd_train(const RunConfig& config, bool resume, std::ostream& out, std::ostream& err) {
  const TrainConfig tc = config.training();
  tc.validate();
  const fs::path dir = config.output;
  require_file(dir / "vocab.tsv");
  require_file(dir / "triples.tsv");
  const Vocab vocab = Vocab::load(dir / "vocab.tsv");
  const TripleStore store =
      TripleStore::load(dir / "triples.tsv", vocab.users.size(), vocab.relations.size(),
                        vocab.pois.size());
  std::optional<TripleStore> content;
  if (fs::exists(dir / "content.tsv")) {
    content = TripleStore::load(dir / "content.tsv", vocab.pois.size(), vocab.content.size(),
                                vocab.pois.size());
  }

  const fs::path model = config.model_path();
  fs::path state = model;
  state += ".state";
  const bool resuming = resume && fs::exists(state);
  if (resume && !resuming) err << "no checkpoint state at " << state.string() << "; starting fresh\n";
  if (!model.parent_path().empty()) fs::create_directories(model.parent_path());

  auto log = open_out(dir / "train_log.jsonl", resuming ? std::ios::app : std::ios::trunc);
  TrainOptions opts;
  opts.checkpoint_path = model;
  opts.checkpoint_every = config.checkpoint_every;
  opts.vocab = &vocab;
  opts.log = &log;

  TrainResult result;
  if (resuming) {
    result = resume_training(state, store, content ? &*content : nullptr, tc, opts);
  } else if (content) {
    result = train_coldstart(store, *content, tc, opts);
  } else {
    result = train(store, tc, opts);
  }
  if (!result.report.epochs.empty()) {
    const auto& last = result.report.epochs.back();
    out << "epoch " << last.epoch << " mean_loss " << format_double(last.mean_loss) << '\n';
  }
  out << "model written to " << model.string() << '\n';
}

void cmd_evaluate(const RunConfig& config, std::string_view split, std::ostream& out) {
  fs::path queries_path;
  if (split == "test") {
    queries_path = config.output / "test.tsv";
  } else if (split == "valid") {
    queries_path = config.output / "valid.tsv";
  } else {
    throw UsageError("split must be test or valid");
  }
  require_file(config.model_path());
  require_file(queries_path);
  const LoadedModel m = load_model(config.model_path());
  const auto queries = load_queries(queries_path);
  const EvalReport report = evaluate(m.params, queries, config.ks);
  const std::string text = report.to_json().dump(2) + "\n";
  write_file(config.output / (split == "test" ? "eval.json" : "eval_valid.json"), text);
  out << text;
}

int cmd_recommend(const RunConfig& config, std::string_view user, std::int64_t timestamp,
                  const Coord& coord, std::ostream& out, std::ostream& err) {
  require_file(config.model_path());
  require_file(config.output / "discretizer.tsv");
  const LoadedModel m = load_model(config.model_path());
  const Discretizer disc = Discretizer::load(config.output / "discretizer.tsv");
  const auto uid = m.vocab.users.find(user);
  if (!uid) throw UsageError("unknown user: " + std::string(user));

  const PatternIndex index(disc, m.vocab.relations);
  const ResolvedPattern resolved = index.resolve(timestamp, coord);
  const std::string requested = pattern_key(resolved.requested);
  if (!resolved.relation) {
    err << "pattern " << requested
        << " is unanswerable: no trained relation shares its time slot or region\n";
    return kExitUnanswerable;
  }
  if (resolved.how != Resolution::kExact) {
    err << "pattern " << requested << " was not seen in training; using "
        << m.vocab.relations.key(*resolved.relation) << " (" << to_string(resolved.how) << ")\n";
  }
  const RowVector v_q = translate_query(m.params, *uid, *resolved.relation);
  const RankedResult ranked = rank_pois(m.params, v_q, *resolved.relation, config.k);
  out << "rank\tpoi\tdistance\n";
  for (std::size_t i = 0; i < ranked.items.size(); ++i) {
    out << i + 1 << '\t' << m.vocab.pois.key(ranked.items[i].poi) << '\t'
        << format_double(ranked.items[i].distance) << '\n';
  }
  return kExitOk;
}

void cmd_experiment(const RunConfig& config, std::string_view which, std::ostream& out,
                    std::ostream& err) {
  static constexpr std::array<std::string_view, 5> kWhich = {"baselines", "dimensions",
                                                             "timeslots", "sparsity", "coldstart"};
  if (std::find(kWhich.begin(), kWhich.end(), which) == kWhich.end()) {
    throw UsageError("unknown experiment: " + std::string(which));
  }
  if (config.input.empty()) throw UsageError("experiment needs an input file (--input)");
  auto parsed = read_checkins(config.input, config.parse_options());
  for (const auto& w : parsed.warnings) err << "warning: " << w << '\n';
  if (!config.content_file.empty()) {
    require_file(config.content_file);
    merge_poi_content(parsed.checkins, config.content_file);
  }
  const TrainConfig tc = config.training();
  tc.validate();
  PipelineSettings settings = config.pipeline();

  std::ostringstream csv;
  if (which == "baselines") {
    const auto data = prepare(parsed.checkins, settings);
    write_accuracy_csv(csv, "model", run_variant_sweep(data, tc));
  } else if (which == "dimensions") {
    const auto data = prepare(parsed.checkins, settings);
    write_accuracy_csv(csv, "dim", run_dimension_sweep(data, tc, config.sweep_dims));
  } else if (which == "timeslots") {
    write_accuracy_csv(csv, "slots", run_timeslot_sweep(parsed.checkins, settings, tc));
  } else if (which == "sparsity") {
    const auto data = prepare(parsed.checkins, settings);
    run_sparsity_experiment(data.train, data.test, config.sparsity_ratios, tc,
                            derive_seed(config.seed, "reduction"))
        .write_csv(csv);
  } else {
    settings.content = true;
    const auto result = run_coldstart_experiment(parsed.checkins, settings, tc, config.cold_threshold);
    err << result.cold_pois << " cold POIs\n";
    result.write_csv(csv);
  }
  fs::create_directories(config.output);
  write_file(config.output / (std::string(which) + ".csv"), csv.str());
  out << csv.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatiotemporal translation embeddings for POI recommendation", "sta"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Flat key = value config file");
    const std::array<std::pair<const char*, const char*>, 16> common = {{
        {"--seed", "seed"},
        {"--variant", "variant"},
        {"--dims", "dims"},
        {"--epochs", "epochs"},
        {"--batch", "batch"},
        {"--margin", "margin"},
        {"--lr", "lr"},
        {"--time-scheme", "time_scheme"},
        {"--regions", "regions"},
        {"--k", "k"},
        {"--output", "output"},
        {"--input", "input"},
        {"--model", "model"},
        {"--content-file", "content_file"},
        {"--region-file", "region_file"},
        {"--format", "format"},
    }};
    for (const auto& [flag, key] : common) {
      sub->add_option(flag, flags[key], std::string("Overrides config key '") + key + "'");
    }
  };

  auto* pre = app.add_subcommand("preprocess", "Build vocabularies, triples and splits");
  auto* tr = app.add_subcommand("train", "Train a model on preprocessed data");
  auto* ev = app.add_subcommand("evaluate", "Accuracy@k of a trained model");
  auto* rec = app.add_subcommand("recommend", "Top-k POIs for one query");
  auto* ex = app.add_subcommand("experiment", "Run an experiment sweep");
  for (auto* sub : {pre, tr, ev, rec, ex}) add_common(sub);

  bool resume = false;
  tr->add_flag("--resume", resume, "Continue from the checkpoint state if present");
  std::string split = "test";
  ev->add_option("--split", split, "test or valid")->check(CLI::IsMember({"test", "valid"}));
  std::string user;
  std::int64_t timestamp = 0;
  double lat = 0.0, lon = 0.0;
  rec->add_option("--user", user, "User key")->required();
  rec->add_option("--time", timestamp, "Unix timestamp (seconds)")->required();
  rec->add_option("--lat", lat, "Latitude")->required();
  rec->add_option("--lon", lon, "Longitude")->required();
  std::string which;
  ex->add_option("which", which, "baselines | dimensions | timeslots | sparsity | coldstart")
      ->required();

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) load_config_file(config, config_path);
    for (const auto* sub : {pre, tr, ev, rec, ex}) {
      if (!sub->parsed()) continue;
      for (const auto& [key, value] : flags) {
        std::string name = key;
        std::replace(name.begin(), name.end(), '_', '-');
        if (sub->count("--" + name) > 0) apply_setting(config, key, value);
      }
    }

    if (pre->parsed()) {
      cmd_preprocess(config, out, err);
    } else if (tr->parsed()) {
      cmd_train(config, resume, out, err);
    } else if (ev->parsed()) {
      cmd_evaluate(config, split, out);
    } else if (rec->parsed()) {
      return cmd_recommend(config, user, timestamp, {lat, lon}, out, err);
    } else {
      cmd_experiment(config, which, out, err);
    }
    return kExitOk;
  } catch (const MissingInputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace sta::cli
