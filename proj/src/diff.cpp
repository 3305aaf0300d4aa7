#include <algorithm>
#include <vector>

#include "corename/diff.hpp"

namespace corename {

namespace {

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    out.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

struct Op {
  char tag;  // ' ', '-', '+'
  std::size_t a, b;  // line indices into before/after
};

// Plain LCS table; files handled here are small.
std::vector<Op> edit_script(const std::vector<std::string_view>& a, const std::vector<std::string_view>& b) {
  std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
  std::vector<Op> ops;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j]) {
      ops.push_back({' ', i++, j++});
    } else if (j < m && (i == n || lcs[i][j + 1] >= lcs[i + 1][j])) {
      ops.push_back({'+', i, j++});
    } else {
      ops.push_back({'-', i++, j});
    }
  }
  // Within a change block, print removals before additions.
  for (std::size_t k = 0; k < ops.size();) {
    if (ops[k].tag == ' ') {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e < ops.size() && ops[e].tag != ' ') ++e;
    std::stable_partition(ops.begin() + k, ops.begin() + e, [](const Op& o) { return o.tag == '-'; });
    k = e;
  }
  return ops;
}

}  // namespace

std::string unified_diff(std::string_view path, std::string_view before, std::string_view after, int context) {
  if (before == after) return {};
  auto a = lines_of(before);
  auto b = lines_of(after);
  auto ops = edit_script(a, b);

  std::string out;
  out += "--- a/";
  out += path;
  out += "\n+++ b/";
  out += path;
  out += "\n";
  std::size_t k = 0;
  auto ctx = static_cast<std::size_t>(context);
  while (k < ops.size()) {
    while (k < ops.size() && ops[k].tag == ' ') ++k;
    if (k == ops.size()) break;
    std::size_t begin = k >= ctx ? k - ctx : 0;
    // Extend the hunk while the next change is within 2*context lines.
    std::size_t end = k;
    while (true) {
      while (end < ops.size() && ops[end].tag != ' ') ++end;
      std::size_t gap = end;
      while (gap < ops.size() && ops[gap].tag == ' ') ++gap;
      if (gap < ops.size() && gap - end <= 2 * ctx) {
        end = gap;
        continue;
      }
      end = std::min(ops.size(), end + ctx);
      break;
    }
    std::size_t a_start = ops[begin].a, b_start = ops[begin].b, a_len = 0, b_len = 0;
    std::string body;
    for (std::size_t i = begin; i < end; ++i) {
      const Op& o = ops[i];
      if (o.tag != '+') ++a_len;
      if (o.tag != '-') ++b_len;
      body += o.tag;
      body += o.tag == '+' ? b[o.b] : a[o.a];
      body += '\n';
    }
    out += "@@ -" + std::to_string(a_len ? a_start + 1 : a_start) + "," + std::to_string(a_len) + " +" +
           std::to_string(b_len ? b_start + 1 : b_start) + "," + std::to_string(b_len) + " @@\n";
    out += body;
    k = end;
  }
  return out;
}

}  // namespace corename
