#include "safetydash/ucr.hpp"

#include "safetydash/error.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace safetydash {

namespace {

std::string_view trim(std::string_view s)
{
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view unquote(std::string_view s)
{
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace

UcrTable UcrTable::defaults()
{
  UcrTable t;
  using C = CrimeCategory;
  // Part I
  for (const char* code : {"01A", "02", "02A", "02B", "03", "04"}) t.set(code, C::violent);
  t.set("01B", C::other);  // negligent manslaughter
  for (const char* code : {"05", "06", "07"}) t.set(code, C::theft);
  t.set("08", C::other);   // arson
  // Part II
  t.set("09", C::other);   // other assaults
  t.set("10", C::other);   // forgery
  t.set("11", C::other);   // fraud
  t.set("12", C::other);   // embezzlement
  t.set("13", C::theft);   // stolen property
  t.set("14", C::other);   // vandalism
  t.set("15", C::other);   // weapons
  t.set("16", C::sex_crime);  // prostitution
  t.set("17", C::sex_crime);  // other sex offenses
  for (const char* code : {"18", "21", "22", "23"}) t.set(code, C::drugs_alcohol);
  for (const char* code : {"19", "20", "24", "25", "26", "27", "28", "29"}) t.set(code, C::other);
  return t;
}

UcrTable UcrTable::parse(std::istream& in)
{
  UcrTable t;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("ucr map line " + std::to_string(line_no) + ": expected 'code = category'");
    }
    const auto code = unquote(trim(line.substr(0, eq)));
    const auto cat_text = unquote(trim(line.substr(eq + 1)));
    if (code.empty()) throw FormatError("ucr map line " + std::to_string(line_no) + ": empty code");
    auto cat = parse_category(cat_text);
    if (!cat) {
      throw FormatError("ucr map line " + std::to_string(line_no) + ": unknown category '" + std::string(cat_text) +
                        "'");
    }
    t.set(std::string(code), *cat);
  }
  return t;
}

UcrTable UcrTable::load(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read ucr map '" + path + "'");
  return parse(in);
}

CrimeCategory UcrTable::categorize(std::string_view code) const
{
  auto it = table_.find(std::string(code));
  return it == table_.end() ? CrimeCategory::other : it->second;
}

std::string UcrTable::to_text() const
{
  std::ostringstream os;
  os << "# ucr_code = category (drugs_alcohol | sex_crime | theft | violent | other)\n";
  for (const auto& [code, cat] : table_) os << code << " = " << to_string(cat) << '\n';
  return os.str();
}

}  // namespace safetydash
