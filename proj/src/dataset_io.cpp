#include "dsgen/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace dsgen {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string iso_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::filesystem::path strip_csv(const std::filesystem::path& p) {
  if (p.extension() == ".csv") {
    auto q = p;
    q.replace_extension();
    return q;
  }
  return p;
}

std::filesystem::path sidecar_path(const std::filesystem::path& base) {
  auto p = base;
  p += ".meta.json";
  return p;
}

// Minimal CSV quoting: our identifiers never need it, but reference files may.
std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line, int lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw ParseError("unterminated quote", lineno);
  fields.push_back(std::move(cur));
  return fields;
}

double parse_number(const std::string& s, int lineno) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || p != end)
    throw ParseError("malformed number '" + s + "'", lineno);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& base_in) {
  if (!dataset.space) throw DataError("write_dataset: dataset has no design space");
  const auto base = strip_csv(base_in);
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());

  auto csv_path = base;
  csv_path += ".csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw DataError("cannot open '" + csv_path.string() + "' for writing");

  const auto& features = dataset.space->features();
  const bool labeled = dataset.labeled();
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (j) csv << ',';
    csv << features[j].name;
  }
  if (labeled) csv << ",working,eta_tt,pr_tt,error";
  csv << '\n';

  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& row = dataset.rows[i];
    for (std::size_t j = 0; j < features.size(); ++j) {
      if (j) csv << ',';
      const FeatureSpec& f = features[j];
      if (f.kind == FeatureKind::categorical) {
        const auto idx = static_cast<std::size_t>(std::lround(row[j]));
        if (idx >= f.categories.size())
          throw DataError("write_dataset: category index out of range in '" + f.name + "'");
        csv << csv_escape(f.categories[idx]);
      } else {
        csv << format_double(row[j]);
      }
    }
    if (labeled) {
      const Labels& l = dataset.labels[i];
      csv << ',' << (l.working ? '1' : '0') << ',' << format_double(l.eta_tt) << ','
          << format_double(l.pr_tt) << ',' << to_string(l.error);
    }
    csv << '\n';
  }
  csv.close();

  ordered_json meta;
  meta["format"] = "dsgen.dataset/1";
  meta["space"] = {{"name", dataset.space->name()},
                   {"document", dataset.space->document()}};
  ordered_json prov;
  prov["method"] = dataset.provenance.method;
  prov["seed"] = dataset.provenance.seed;
  prov["evaluator"] = dataset.provenance.evaluator_id;
  prov["toolkit_version"] = dataset.provenance.toolkit_version;
  prov["created_at"] = dataset.provenance.created_at.empty() ? iso_utc_now()
                                                             : dataset.provenance.created_at;
  prov["clip_events"] = dataset.provenance.clip_events;
  meta["provenance"] = std::move(prov);
  meta["rows"] = dataset.size();
  meta["labeled"] = labeled;
  if (!dataset.parents.empty()) meta["parents"] = dataset.parents;
  if (!dataset.split.empty()) {
    ordered_json splits = ordered_json::object();
    std::vector<std::string> names;
    for (const auto& tag : dataset.split)
      if (!tag.empty() && std::find(names.begin(), names.end(), tag) == names.end())
        names.push_back(tag);
    std::sort(names.begin(), names.end());
    for (const auto& name : names) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < dataset.split.size(); ++i)
        if (dataset.split[i] == name) idx.push_back(i);
      splits[name] = idx;
    }
    meta["splits"] = std::move(splits);
  }

  std::ofstream side(sidecar_path(base), std::ios::binary);
  if (!side) throw DataError("cannot open sidecar for writing");
  side << meta.dump(2) << '\n';
}

Dataset read_csv_with_space(const std::filesystem::path& csv_path,
                            std::shared_ptr<const DesignSpace> space) {
  if (!space) throw DataError("read_csv_with_space: null space");
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + csv_path.string() + "'");

  Dataset ds;
  ds.space = space;

  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty CSV file", 1);
  ++lineno;
  const auto header = split_csv_line(line, lineno);
  const auto& features = space->features();
  const std::size_t d = features.size();
  if (header.size() != d && header.size() != d + 4)
    throw ParseError("header has " + std::to_string(header.size()) + " columns, expected " +
                         std::to_string(d) + " features (optionally + 4 label columns)",
                     lineno);
  for (std::size_t j = 0; j < d; ++j)
    if (header[j] != features[j].name)
      throw ParseError("column " + std::to_string(j + 1) + " is '" + header[j] +
                           "', expected feature '" + features[j].name + "'",
                       lineno);
  const bool labeled = header.size() == d + 4;
  if (labeled) {
    const char* expect[4] = {"working", "eta_tt", "pr_tt", "error"};
    for (std::size_t j = 0; j < 4; ++j)
      if (header[d + j] != expect[j])
        throw ParseError(std::string("label column '") + expect[j] + "' missing", lineno);
  }

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line, lineno);
    if (fields.size() != header.size())
      throw ParseError("row has " + std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(header.size()),
                       lineno);
    DesignVector row(d);
    for (std::size_t j = 0; j < d; ++j) {
      const FeatureSpec& f = features[j];
      if (f.kind == FeatureKind::categorical) {
        const auto it = std::find(f.categories.begin(), f.categories.end(), fields[j]);
        if (it != f.categories.end()) {
          row[j] = static_cast<double>(it - f.categories.begin());
        } else {
          row[j] = parse_number(fields[j], lineno);  // numeric index fallback
        }
      } else {
        row[j] = parse_number(fields[j], lineno);
      }
    }
    ds.rows.push_back(std::move(row));
    if (labeled) {
      Labels l;
      l.working = parse_number(fields[d], lineno) != 0.0;
      l.eta_tt = parse_number(fields[d + 1], lineno);
      l.pr_tt = parse_number(fields[d + 2], lineno);
      const auto err = label_error_from_string(fields[d + 3]);
      if (!err) throw ParseError("unknown error code '" + fields[d + 3] + "'", lineno);
      l.error = *err;
      ds.labels.push_back(l);
    }
  }
  return ds;
}

Dataset read_dataset(const std::filesystem::path& csv_path) {
  const auto base = strip_csv(csv_path);
  const auto side_path = sidecar_path(base);
  std::ifstream side(side_path, std::ios::binary);
  if (!side)
    throw DataError("sidecar '" + side_path.string() +
                    "' not found (use read_csv_with_space for bare CSV files)");
  ordered_json meta;
  try {
    side >> meta;
  } catch (const std::exception& e) {
    throw ParseError("malformed sidecar: " + std::string(e.what()));
  }
  if (!meta.contains("space") || !meta["space"].contains("document"))
    throw ParseError("sidecar is missing the space document");

  auto space = std::make_shared<DesignSpace>(
      DesignSpace::parse(meta["space"]["document"].get<std::string>()));

  auto real_csv = base;
  real_csv += ".csv";
  Dataset ds = read_csv_with_space(real_csv, std::move(space));

  if (meta.contains("provenance")) {
    const auto& p = meta["provenance"];
    ds.provenance.method = p.value("method", "");
    ds.provenance.seed = p.value("seed", std::uint64_t{0});
    ds.provenance.evaluator_id = p.value("evaluator", "");
    ds.provenance.toolkit_version = p.value("toolkit_version", "");
    ds.provenance.created_at = p.value("created_at", "");
    ds.provenance.clip_events = p.value("clip_events", 0);
  }
  if (meta.contains("parents")) {
    ds.parents = meta["parents"].get<std::vector<std::int64_t>>();
    if (ds.parents.size() != ds.size())
      throw ParseError("sidecar parent list does not match the row count");
  }
  if (meta.contains("splits")) {
    ds.split.assign(ds.size(), "");
    for (const auto& [name, indices] : meta["splits"].items()) {
      for (const auto& idx : indices) {
        const auto i = idx.get<std::size_t>();
        if (i >= ds.size()) throw ParseError("split index out of range in sidecar");
        if (!ds.split[i].empty()) throw ParseError("row carries two split tags in sidecar");
        ds.split[i] = name;
      }
    }
  }
  return ds;
}

}  // namespace dsgen
