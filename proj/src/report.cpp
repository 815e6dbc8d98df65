#include "hrl/report.hpp"

#include <sstream>

namespace hrl::report {

namespace {

std::string escape_html(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

SelectionReport render_selection_report(const Corpus& corpus, const Document& doc,
                                        const AspectQuery& query, const HighTrajectory& traj,
                                        int predicted_rating, bool fallback) {
  const std::string& aspect = corpus.aspects[static_cast<size_t>(query.aspect_index)].name;
  SelectionReport out;

  std::ostringstream txt;
  txt << "document " << doc.id << "  aspect " << aspect << "  gold " << query.rating
      << "  predicted " << predicted_rating;
  if (fallback) txt << "  [fallback: random rating, no clause selected]";
  txt << "\n";
  for (size_t i = 0; i < doc.clauses.size(); ++i) {
    const bool sel = i < traj.steps.size() && traj.steps[i].option == 1;
    txt << "clause " << (i + 1) << (sel ? " [selected]  " : " [discarded] ");
    for (size_t j = 0; j < doc.clauses[i].token_ids.size(); ++j) {
      const std::string& tok = corpus.vocab.token(doc.clauses[i].token_ids[j]);
      const bool word_sel = sel && j < traj.lows[i].actions.size() && traj.lows[i].actions[j];
      txt << (word_sel ? "*" + tok + "*" : tok);
      if (j + 1 < doc.clauses[i].token_ids.size()) txt << ' ';
    }
    txt << "\n";
  }
  out.text = txt.str();

  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\"/>\n<title>selection "
       << escape_html(doc.id) << "</title>\n<style>\n"
       << ".clause{margin:4px;padding:4px;border-left:4px solid #bbb;color:#777;}\n"
       << ".clause.selected{border-left-color:#c0392b;color:#000;}\n"
       << ".word.selected{background:#aed6f1;font-weight:bold;}\n"
       << "</style>\n</head>\n<body>\n";
  html << "<h3>document " << escape_html(doc.id) << " &middot; aspect " << escape_html(aspect)
       << "</h3>\n";
  html << "<p>gold rating " << query.rating << ", predicted " << predicted_rating;
  if (fallback) html << " <em>(fallback: random rating, no clause selected)</em>";
  html << "</p>\n";
  for (size_t i = 0; i < doc.clauses.size(); ++i) {
    const bool sel = i < traj.steps.size() && traj.steps[i].option == 1;
    html << "<p class=\"clause" << (sel ? " selected" : "") << "\">";
    for (size_t j = 0; j < doc.clauses[i].token_ids.size(); ++j) {
      const std::string& tok = corpus.vocab.token(doc.clauses[i].token_ids[j]);
      const bool word_sel = sel && j < traj.lows[i].actions.size() && traj.lows[i].actions[j];
      html << "<span class=\"word" << (word_sel ? " selected" : "") << "\">"
           << escape_html(tok) << "</span>";
      if (j + 1 < doc.clauses[i].token_ids.size()) html << ' ';
    }
    html << "</p>\n";
  }
  html << "</body>\n</html>\n";
  out.html = html.str();
  return out;
}

}  // namespace hrl::report
