#include "bifree/json_io.hpp"

#include "bifree/errors.hpp"

namespace bifree {

namespace {

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing JSON field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("bad JSON field '") + key + "': " + e.what());
  }
}

}  // namespace

Blocks blocks_from_json(const json& j) {
  try {
    return j.get<Blocks>();
  } catch (const json::exception& e) {
    throw InputError(std::string("partition must be a list of integer lists: ") + e.what());
  }
}

json blocks_to_json(const Blocks& b) { return json(b); }

json to_json(const BncPartition& pi) {
  return {{"n", pi.size()}, {"chi", pi.chi().str()}, {"blocks", blocks_to_json(pi.blocks())}};
}

BncPartition partition_from_json(const json& j) {
  const ChiWord chi = ChiWord::parse(field<std::string>(j, "chi"));
  if (j.contains("n") && field<int>(j, "n") != chi.size()) throw InputError("'n' does not match chi length");
  return BncPartition(chi, blocks_from_json(j.at("blocks")));
}

json to_json(const BElement& b) {
  json re = json::array(), im = json::array();
  for (int i = 0; i < b.rows(); ++i) {
    json rr = json::array(), ir = json::array();
    for (int k = 0; k < b.cols(); ++k) {
      rr.push_back(b(i, k).real());
      ir.push_back(b(i, k).imag());
    }
    re.push_back(rr);
    im.push_back(ir);
  }
  return {{"d", b.rows()}, {"re", re}, {"im", im}};
}

BElement belement_from_json(const json& j) {
  const int d = field<int>(j, "d");
  if (d < 1) throw InputError("BElement dimension must be >= 1");
  const auto re = field<std::vector<std::vector<double>>>(j, "re");
  std::vector<std::vector<double>> im(d, std::vector<double>(d, 0.0));
  if (j.contains("im")) im = field<std::vector<std::vector<double>>>(j, "im");
  if (static_cast<int>(re.size()) != d || static_cast<int>(im.size()) != d)
    throw InputError("BElement entries must be d x d");
  BElement b(d, d);
  for (int r = 0; r < d; ++r) {
    if (static_cast<int>(re[r].size()) != d || static_cast<int>(im[r].size()) != d)
      throw InputError("BElement entries must be d x d");
    for (int c = 0; c < d; ++c) b(r, c) = cplx(re[r][c], im[r][c]);
  }
  return b;
}

json to_json(const CPMap& eta) {
  json k = json::array();
  for (const auto& v : eta.kraus()) k.push_back(to_json(v));
  return {{"d", eta.dim()}, {"kraus", k}};
}

CPMap cpmap_from_json(const json& j) {
  const int d = field<int>(j, "d");
  if (!j.contains("kraus") || !j.at("kraus").is_array()) throw InputError("CPMap needs a 'kraus' list");
  std::vector<BElement> kraus;
  for (const auto& k : j.at("kraus")) kraus.push_back(belement_from_json(k));
  return CPMap(d, std::move(kraus));
}

json to_json(const PartitionTable& table) {
  json out = json::array();
  for (const auto& e : table)
    out.push_back({{"chi", e.partition.chi().str()},
                   {"partition", blocks_to_json(e.partition.blocks())},
                   {"value", to_json(e.value)}});
  return out;
}

PartitionTable table_from_json(const json& j) {
  if (!j.is_array()) throw InputError("table must be a JSON array");
  PartitionTable out;
  for (const auto& e : j) {
    const ChiWord chi = ChiWord::parse(field<std::string>(e, "chi"));
    out.push_back({BncPartition(chi, blocks_from_json(e.at("partition"))), belement_from_json(e.at("value"))});
  }
  return out;
}

std::shared_ptr<FockModel> fock_model_from_json(const json& j) {
  const int d = field<int>(j, "d");
  std::vector<CPMap> left, right;
  if (j.contains("left"))
    for (const auto& e : j.at("left")) left.push_back(cpmap_from_json(e));
  if (j.contains("right"))
    for (const auto& e : j.at("right")) right.push_back(cpmap_from_json(e));
  for (const auto& e : left)
    if (e.dim() != d) throw InputError("covariance dimension does not match d");
  for (const auto& e : right)
    if (e.dim() != d) throw InputError("covariance dimension does not match d");
  return make_bisemicircular(left, right);
}

}  // namespace bifree
