#include "explorer/state_abstraction.hpp"

#include <algorithm>
#include <set>

#include "html/dom.hpp"

namespace webprobe::explorer {
namespace {

bool volatile_attribute(const std::string& name) {
  return name == "value" || name == "selected" || name == "checked" || name == "style";
}

void walk(const html::Node& node, const std::string& prefix, Fingerprint& out) {
  for (const auto& child : node.children()) {
    if (!child->is_element()) continue;
    std::set<std::string> names;
    for (const auto& [k, v] : child->attributes())
      if (!volatile_attribute(k)) names.insert(k);
    std::string step = child->tag();
    if (!names.empty()) {
      step += '[';
      bool first = true;
      for (const auto& n : names) {
        if (!first) step += ',';
        step += n;
        first = false;
      }
      step += ']';
    }
    std::string path = prefix.empty() ? step : prefix + "/" + step;
    ++out[path];
    walk(*child, path, out);
  }
}

}  // namespace

Fingerprint fingerprint(std::string_view html) {
  Fingerprint fp;
  auto doc = html::Document::parse(html);
  walk(doc.root(), "", fp);
  return fp;
}

double similarity(const Fingerprint& a, const Fingerprint& b) {
  long long inter = 0;
  long long uni = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      uni += ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      uni += ib->second;
      ++ib;
    } else {
      inter += std::min(ia->second, ib->second);
      uni += std::max(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::optional<StateId> StateAbstractor::match(const Fingerprint& fp) const {
  std::optional<StateId> best;
  double best_sim = -1.0;
  for (const auto& s : graph_->states()) {
    double sim = similarity(fp, s.fingerprint);
    if (sim >= threshold_ && sim > best_sim) {
      best = s.id;
      best_sim = sim;
      if (sim == 1.0) break;
    }
  }
  return best;
}

Abstraction StateAbstractor::abstract(const env::PageObservation& obs, std::int64_t step) {
  auto fp = fingerprint(obs.html);
  if (auto id = match(fp)) return {*id, false};
  stategraph::StateRecord rec;
  rec.fingerprint = std::move(fp);
  rec.first_seen_step = step;
  rec.url = obs.url;
  StateId id = graph_->add_state(std::move(rec));
  screenshots_[id] = obs.screenshot;
  return {id, true};
}

}  // namespace webprobe::explorer
