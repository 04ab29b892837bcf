#include "kga/lexical.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "kga/text.hpp"

namespace kga::lexical {

using text::fold_case;
using text::is_ascii_alpha;
using text::is_ascii_digit;
using text::is_ascii_lower;
using text::is_ascii_upper;

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Levenshtein: return "levenshtein";
    case Metric::JaroWinkler: return "jaro-winkler";
    case Metric::Jaccard: return "jaccard";
    case Metric::Combined: return "combined";
  }
  return "?";
}

std::optional<Metric> metric_from_string(std::string_view name) {
  if (name == "levenshtein") return Metric::Levenshtein;
  if (name == "jaro-winkler") return Metric::JaroWinkler;
  if (name == "jaccard") return Metric::Jaccard;
  if (name == "combined") return Metric::Combined;
  return std::nullopt;
}

std::string_view to_string(Blocking b) {
  return b == Blocking::None ? "none" : "shared-token";
}

std::optional<Blocking> blocking_from_string(std::string_view name) {
  if (name == "none") return Blocking::None;
  if (name == "shared-token") return Blocking::SharedToken;
  return std::nullopt;
}

NormalizedName normalize(std::string_view name) {
  NormalizedName out;
  out.original = std::string(name);

  std::vector<char32_t> cps = text::utf8_decode(name);

  // camelCase boundaries: lower→upper, and the last upper of an acronym run
  // followed by lower ("HTTPServer" → "HTTP Server").
  std::vector<char32_t> spaced;
  spaced.reserve(cps.size() + 8);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (i > 0 && is_ascii_upper(cps[i])) {
      bool boundary = is_ascii_lower(cps[i - 1]) ||
                      (is_ascii_upper(cps[i - 1]) && i + 1 < cps.size() &&
                       is_ascii_lower(cps[i + 1]));
      if (boundary) spaced.push_back(U' ');
    }
    spaced.push_back(cps[i]);
  }

  std::vector<char32_t> cleaned;
  cleaned.reserve(spaced.size());
  for (char32_t cp : spaced) {
    if (cp == U'_' || cp == U'-' || cp == U'/') {
      cleaned.push_back(U' ');
    } else if (cp < 0x80 && !is_ascii_alpha(cp) && !is_ascii_digit(cp) &&
               cp != U' ' && cp != U'\t' && cp != U'\n' && cp != U'\r') {
      // drop remaining ASCII punctuation
    } else {
      cleaned.push_back(fold_case(cp));
    }
  }

  std::string token;
  auto flush = [&] {
    if (!token.empty()) {
      out.tokens.push_back(token);
      token.clear();
    }
  };
  for (char32_t cp : cleaned) {
    if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r') {
      flush();
    } else {
      text::utf8_append(token, cp);
    }
  }
  flush();

  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    if (i > 0) out.joined += ' ';
    out.joined += out.tokens[i];
  }
  return out;
}

double levenshtein_sim(std::string_view a, std::string_view b) {
  std::vector<char32_t> ca = text::utf8_decode(a);
  std::vector<char32_t> cb = text::utf8_decode(b);
  std::size_t n = ca.size();
  std::size_t m = cb.size();
  if (n == 0 && m == 0) return 1.0;
  if (n == 0 || m == 0) return 0.0;

  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t cost = ca[i - 1] == cb[j - 1] ? 0 : 1;
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
    }
    std::swap(prev, cur);
  }
  double dist = static_cast<double>(prev[m]);
  return 1.0 - dist / static_cast<double>(std::max(n, m));
}

double jaro_winkler_sim(std::string_view a, std::string_view b) {
  std::vector<char32_t> ca = text::utf8_decode(a);
  std::vector<char32_t> cb = text::utf8_decode(b);
  std::size_t n = ca.size();
  std::size_t m = cb.size();
  if (n == 0 && m == 0) return 1.0;
  if (n == 0 || m == 0) return 0.0;

  std::size_t window = std::max(n, m) / 2;
  window = window > 0 ? window - 1 : 0;

  std::vector<bool> matched_a(n, false);
  std::vector<bool> matched_b(m, false);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i > window ? i - window : 0;
    std::size_t hi = std::min(m, i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (!matched_b[j] && ca[i] == cb[j]) {
        matched_a[i] = true;
        matched_b[j] = true;
        ++matches;
        break;
      }
    }
  }
  if (matches == 0) return 0.0;

  std::size_t transpositions = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!matched_a[i]) continue;
    while (!matched_b[k]) ++k;
    if (ca[i] != cb[k]) ++transpositions;
    ++k;
  }
  double mm = static_cast<double>(matches);
  double t = static_cast<double>(transpositions / 2);
  double jaro = (mm / static_cast<double>(n) + mm / static_cast<double>(m) +
                 (mm - t) / mm) /
                3.0;

  std::size_t prefix = 0;
  for (std::size_t i = 0; i < std::min({n, m, std::size_t{4}}); ++i) {
    if (ca[i] == cb[i]) {
      ++prefix;
    } else {
      break;
    }
  }
  double jw = jaro + static_cast<double>(prefix) * 0.1 * (1.0 - jaro);
  return std::clamp(jw, 0.0, 1.0);
}

double jaccard_sim(const NormalizedName& a, const NormalizedName& b) {
  std::set<std::string> sa(a.tokens.begin(), a.tokens.end());
  std::set<std::string> sb(b.tokens.begin(), b.tokens.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& tok : sa) {
    if (sb.contains(tok)) ++inter;
  }
  std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

double pair_score(const NormalizedName& a, const NormalizedName& b,
                  Metric metric) {
  switch (metric) {
    case Metric::Levenshtein: return levenshtein_sim(a.joined, b.joined);
    case Metric::JaroWinkler: return jaro_winkler_sim(a.joined, b.joined);
    case Metric::Jaccard: return jaccard_sim(a, b);
    case Metric::Combined:
      return std::max({levenshtein_sim(a.joined, b.joined),
                       jaro_winkler_sim(a.joined, b.joined),
                       jaccard_sim(a, b)});
  }
  return 0.0;
}

std::vector<NormalizedName> normalized_labels(const Entity& e) {
  std::vector<NormalizedName> out;
  out.reserve(e.labels.size());
  for (const Label& label : e.labels) out.push_back(normalize(label.text));
  return out;
}

}  // namespace

double entity_similarity(const Entity& e1, const Entity& e2,
                         const MatcherConfig& cfg) {
  if (e1.kind != e2.kind) {
    throw KgaError("entity_similarity requires entities of the same kind: " +
                   e1.iri.str() + " vs " + e2.iri.str());
  }
  std::vector<NormalizedName> n1 = normalized_labels(e1);
  std::vector<NormalizedName> n2 = normalized_labels(e2);
  double best = 0.0;
  for (const auto& a : n1) {
    for (const auto& b : n2) {
      best = std::max(best, pair_score(a, b, cfg.metric));
    }
  }
  return best;
}

Alignment generate_candidates(const KnowledgeGraph& kg1,
                              const KnowledgeGraph& kg2,
                              const MatcherConfig& cfg) {
  if (cfg.candidate_threshold < 0.0 || cfg.candidate_threshold > 1.0) {
    throw KgaError("candidate threshold out of range [0,1]");
  }

  // Token index over target labels when blocking is on.
  std::map<std::string, std::vector<const Entity*>> token_index;
  if (cfg.blocking == Blocking::SharedToken) {
    for (const auto& [iri, entity] : kg2.entities()) {
      std::set<std::string> seen;
      for (const Label& label : entity.labels) {
        for (const auto& tok : normalize(label.text).tokens) {
          if (seen.insert(tok).second) token_index[tok].push_back(&entity);
        }
      }
    }
  }

  Alignment out;
  for (const auto& [iri1, e1] : kg1.entities()) {
    std::vector<const Entity*> pool;
    if (cfg.blocking == Blocking::SharedToken) {
      std::set<const Entity*> seen;
      for (const Label& label : e1.labels) {
        for (const auto& tok : normalize(label.text).tokens) {
          auto it = token_index.find(tok);
          if (it == token_index.end()) continue;
          for (const Entity* e2 : it->second) {
            if (seen.insert(e2).second) pool.push_back(e2);
          }
        }
      }
    } else {
      for (const auto& [iri2, e2] : kg2.entities()) pool.push_back(&e2);
    }
    for (const Entity* e2 : pool) {
      if (e2->kind != e1.kind) continue;
      double sim = entity_similarity(e1, *e2, cfg);
      if (sim >= cfg.candidate_threshold) {
        out.add(Mapping{iri1, e2->iri, Relation::Equivalent, sim});
      }
    }
  }
  return out;
}

}  // namespace kga::lexical
