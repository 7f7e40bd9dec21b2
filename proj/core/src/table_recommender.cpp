#include "guirec/table_recommender.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

#include "guirec/errors.hpp"

namespace guirec {

namespace {

constexpr std::string_view kTableMagic = "guirec-table";

class TableCursor final : public RecommenderCursor {
 public:
  explicit TableCursor(const TransitionTable& table) : table_(table) {}

  void observe(ActionId action) override {
    if (action < 1 || action > table_.n_actions()) {
      throw std::out_of_range("action " + std::to_string(action) + " outside table vocabulary");
    }
    last_ = action;
  }

  RankedList rank(std::size_t n) const override {
    if (last_ == 0) return top_n(std::vector<double>(table_.n_actions(), 0.0), n);
    return top_n(table_.scores_after(last_), n);
  }

 private:
  const TransitionTable& table_;
  ActionId last_ = 0;
};

}  // namespace

TransitionTable::TransitionTable(std::size_t n_actions, std::string name)
    : n_actions_(n_actions), name_(std::move(name)) {}

void TransitionTable::set(ActionId previous, ActionId next, double weight) {
  if (previous < 1 || next < 1 || previous > n_actions_ || next > n_actions_) {
    throw std::out_of_range("transition outside table vocabulary");
  }
  weights_[{previous, next}] = weight;
}

double TransitionTable::weight(ActionId previous, ActionId next) const {
  auto it = weights_.find({previous, next});
  return it == weights_.end() ? 0.0 : it->second;
}

std::vector<double> TransitionTable::scores_after(ActionId previous) const {
  std::vector<double> scores(n_actions_, 0.0);
  for (auto it = weights_.lower_bound({previous, 0}); it != weights_.end() && it->first.first == previous; ++it) {
    scores[it->first.second - 1] = it->second;
  }
  return scores;
}

std::unique_ptr<RecommenderCursor> TransitionTable::start_session() const {
  return std::make_unique<TableCursor>(*this);
}

TransitionTable fit_transition_table(const SessionLog& log) {
  TransitionTable table(log.catalog.size());
  for (const auto& s : log.sessions) {
    for (std::size_t i = 0; i + 1 < s.action_ids.size(); ++i) {
      const auto a = s.action_ids[i];
      const auto b = s.action_ids[i + 1];
      table.set(a, b, table.weight(a, b) + 1.0);
    }
  }
  return table;
}

void save_table(std::ostream& out, const TransitionTable& table) {
  out << kTableMagic << " 1\n";
  out << "n_actions " << table.n_actions() << '\n';
  char buffer[32];
  const auto n = static_cast<ActionId>(table.n_actions());
  for (ActionId a = 1; a <= n; ++a) {
    const auto scores = table.scores_after(a);
    for (ActionId b = 1; b <= n; ++b) {
      if (scores[b - 1] == 0.0) continue;
      std::snprintf(buffer, sizeof buffer, "%.17g", scores[b - 1]);
      out << a << ' ' << b << ' ' << buffer << '\n';
    }
  }
}

TransitionTable load_table(std::istream& in, std::string name) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line() || line != std::string(kTableMagic) + " 1") throw ParseError("not a guirec-table v1 file", line_no);
  std::size_t n = 0;
  {
    if (!next_line()) throw ParseError("missing n_actions line", line_no);
    std::istringstream header(line);
    std::string key;
    if (!(header >> key >> n) || key != "n_actions" || n == 0) throw ParseError("expected 'n_actions <N>'", line_no);
  }
  TransitionTable table(n, std::move(name));
  while (next_line()) {
    std::istringstream row(line);
    long long a = 0;
    long long b = 0;
    double w = 0.0;
    std::string rest;
    if (!(row >> a >> b >> w) || (row >> rest)) throw ParseError("expected '<previous> <next> <weight>'", line_no);
    if (a < 1 || b < 1 || static_cast<std::size_t>(a) > n || static_cast<std::size_t>(b) > n) {
      throw IntegrityError("line " + std::to_string(line_no) + ": action outside 1.." + std::to_string(n));
    }
    table.set(static_cast<ActionId>(a), static_cast<ActionId>(b), w);
  }
  return table;
}

bool is_table_stream(std::istream& in) {
  const auto start = in.tellg();
  std::string head(kTableMagic.size(), '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  const bool match = in.gcount() == static_cast<std::streamsize>(head.size()) && head == kTableMagic;
  in.clear();
  in.seekg(start);
  return match;
}

}  // namespace guirec
