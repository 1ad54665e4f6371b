#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace gkcat {

/// Minimal deterministic JSON emitter.  Numbers are printed with 12
/// significant digits so reruns produce byte-identical output.
class JsonWriter {
public:
    static std::string number(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return buf;
    }

    void begin_object() { open('{'); }
    void end_object() { close('}'); }
    void begin_array() { open('['); }
    void end_array() { close(']'); }

    void key(std::string_view name) {
        comma();
        buf_ += '"';
        escape(name);
        buf_ += "\": ";
        pending_value_ = true;
    }

    void value(double v) { raw(number(v)); }
    void value(int v) { raw(std::to_string(v)); }
    void value(long v) { raw(std::to_string(v)); }
    void value(bool v) { raw(v ? "true" : "false"); }
    void value(std::string_view s) {
        comma();
        buf_ += '"';
        escape(s);
        buf_ += '"';
    }
    void value(const char* s) { value(std::string_view(s)); }

    template <typename T>
    void field(std::string_view name, T v) {
        key(name);
        value(v);
    }

    std::string str() const { return buf_ + "\n"; }

private:
    void open(char ch) {
        comma();
        buf_ += ch;
        first_.push_back(true);
    }
    void close(char ch) {
        first_.pop_back();
        buf_ += '\n';
        indent();
        buf_ += ch;
    }
    void comma() {
        if (pending_value_) {
            pending_value_ = false;
            return;
        }
        if (first_.empty()) return;
        if (!first_.back()) buf_ += ',';
        first_.back() = false;
        buf_ += '\n';
        indent();
    }
    void raw(const std::string& text) {
        comma();
        buf_ += text;
    }
    void indent() { buf_.append(first_.size() * 2, ' '); }
    void escape(std::string_view s) {
        for (char ch : s) {
            switch (ch) {
                case '"': buf_ += "\\\""; break;
                case '\\': buf_ += "\\\\"; break;
                case '\n': buf_ += "\\n"; break;
                case '\t': buf_ += "\\t"; break;
                default: buf_ += ch;
            }
        }
    }

    std::string buf_;
    std::vector<bool> first_;
    bool pending_value_ = false;
};

}  // namespace gkcat
