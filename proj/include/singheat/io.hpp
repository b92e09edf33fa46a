#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace singheat {

// full-precision decimal rendering ("%.17g"); the single formatter used for
// every emitted artifact so identical configs give byte-identical files
std::string g17(double x);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);

// FNV-1a 64-bit content hash, hex-encoded
std::string fnv1a_hex(std::string_view data);

// CSV with a header row and g17-formatted cells
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

// minimal ordered JSON value builder (objects keep insertion order so output
// is deterministic)
class Json {
  public:
    static Json num(double v);
    static Json integer(long long v);
    static Json boolean(bool v);
    static Json str(std::string v);
    static Json arr();
    static Json obj();
    static Json num_arr(const std::vector<double>& v);

    Json& push(Json v);                     // arrays
    Json& set(const std::string& key, Json v); // objects
    std::string dump(int indent = 0) const;

  private:
    enum class Kind { Num, Int, Bool, Str, Arr, Obj } kind_ = Kind::Num;
    double num_ = 0.0;
    long long int_ = 0;
    bool bool_ = false;
    std::string str_;
    std::vector<Json> items_;
    std::vector<std::pair<std::string, Json>> members_;
    void dump_to(std::string& out, int indent, int depth) const;
};

// flat key=value config document; '#' starts a comment, blank lines ignored.
// Throws config_error on malformed lines or duplicate keys.
std::map<std::string, std::string> parse_kv(const std::string& text);
std::string dump_kv(const std::map<std::string, std::string>& kv);

} // namespace singheat
