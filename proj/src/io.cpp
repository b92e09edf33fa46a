#include "singheat/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "singheat/errors.hpp"

namespace singheat {

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw config_error("cannot write file: " + path);
    out << content;
    if (!out) throw config_error("write failed: " + path);
}

bool file_exists(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return static_cast<bool>(in);
}

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw config_error("csv_table: row width does not match header");
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += g17(row[i]);
        }
        out += '\n';
    }
    return out;
}

Json Json::num(double v) {
    Json j;
    j.kind_ = Kind::Num;
    j.num_ = v;
    return j;
}
Json Json::integer(long long v) {
    Json j;
    j.kind_ = Kind::Int;
    j.int_ = v;
    return j;
}
Json Json::boolean(bool v) {
    Json j;
    j.kind_ = Kind::Bool;
    j.bool_ = v;
    return j;
}
Json Json::str(std::string v) {
    Json j;
    j.kind_ = Kind::Str;
    j.str_ = std::move(v);
    return j;
}
Json Json::arr() {
    Json j;
    j.kind_ = Kind::Arr;
    return j;
}
Json Json::obj() {
    Json j;
    j.kind_ = Kind::Obj;
    return j;
}
Json Json::num_arr(const std::vector<double>& v) {
    Json j = arr();
    for (double x : v) j.push(num(x));
    return j;
}

Json& Json::push(Json v) {
    if (kind_ != Kind::Arr) throw config_error("Json::push on non-array");
    items_.push_back(std::move(v));
    return *this;
}

Json& Json::set(const std::string& key, Json v) {
    if (kind_ != Kind::Obj) throw config_error("Json::set on non-object");
    members_.emplace_back(key, std::move(v));
    return *this;
}

namespace {
std::string json_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}
} // namespace

void Json::dump_to(std::string& out, int indent, int depth) const {
    const std::string pad(indent * (depth + 1), ' ');
    const std::string close_pad(indent * depth, ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (kind_) {
        case Kind::Num: out += g17(num_); break;
        case Kind::Int: out += std::to_string(int_); break;
        case Kind::Bool: out += bool_ ? "true" : "false"; break;
        case Kind::Str: out += json_escape(str_); break;
        case Kind::Arr:
            out += '[';
            for (size_t i = 0; i < items_.size(); ++i) {
                if (i) out += ',';
                out += nl;
                out += pad;
                items_[i].dump_to(out, indent, depth + 1);
            }
            if (!items_.empty()) {
                out += nl;
                out += close_pad;
            }
            out += ']';
            break;
        case Kind::Obj:
            out += '{';
            for (size_t i = 0; i < members_.size(); ++i) {
                if (i) out += ',';
                out += nl;
                out += pad;
                out += json_escape(members_[i].first);
                out += indent > 0 ? ": " : ":";
                members_[i].second.dump_to(out, indent, depth + 1);
            }
            if (!members_.empty()) {
                out += nl;
                out += close_pad;
            }
            out += '}';
            break;
    }
}

std::string Json::dump(int indent) const {
    std::string out;
    dump_to(out, indent, 0);
    out += '\n';
    return out;
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const size_t eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw config_error("config line " + std::to_string(lineno) +
                               ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        const size_t ke = key.find_last_not_of(" \t");
        key = key.substr(0, ke + 1);
        const size_t vb = val.find_first_not_of(" \t");
        val = (vb == std::string::npos) ? "" : val.substr(vb);
        if (kv.count(key))
            throw config_error("config line " + std::to_string(lineno) +
                               ": duplicate key '" + key + "'");
        kv[key] = val;
    }
    return kv;
}

std::string dump_kv(const std::map<std::string, std::string>& kv) {
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

} // namespace singheat
