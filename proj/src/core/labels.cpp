#include "labels.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "errors.hpp"

namespace sift {

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

} // namespace

void LabelRegistry::add(std::string address, Label label, std::string source) {
    address = lowercase(std::move(address));
    auto it = entries.find(address);
    if (it == entries.end()) {
        entries.emplace(std::move(address), LabelEntry{label, std::move(source)});
        return;
    }
    if (it->second.label != label) {
        warnings.push_back("conflicting labels for " + address + "; keeping malicious");
        if (label == Label::Malicious) {
            // The upgrade should credit the source that flagged the address.
            it->second.source = std::move(source);
        }
        it->second.label = Label::Malicious;
    }
}

LabelRegistry load_label_registry(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorKind::Io, "cannot open label file '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        raise(ErrorKind::EmptyRegistry, "label file '" + path + "' is empty");
    }
    if (strip_cr(line) != "address,label,source") {
        raise(ErrorKind::MalformedRow, path + ":1: expected header 'address,label,source'");
    }

    LabelRegistry registry;
    uint64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        size_t c1 = line.find(',');
        size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            raise(ErrorKind::MalformedRow, path + ":" + std::to_string(line_no) + ": expected 3 columns");
        }
        std::string address = line.substr(0, c1);
        std::string label_text = lowercase(line.substr(c1 + 1, c2 - c1 - 1));
        std::string source = line.substr(c2 + 1);
        if (address.empty()) {
            raise(ErrorKind::MalformedRow, path + ":" + std::to_string(line_no) + ": empty address");
        }
        Label label;
        if (label_text == "good") {
            label = Label::Good;
        } else if (label_text == "malicious") {
            label = Label::Malicious;
        } else {
            raise(ErrorKind::MalformedRow,
                  path + ":" + std::to_string(line_no) + ": label must be good or malicious");
        }
        registry.add(std::move(address), label, std::move(source));
    }
    if (registry.entries.empty()) {
        raise(ErrorKind::EmptyRegistry, "label file '" + path + "' has no data rows");
    }
    return registry;
}

void save_label_registry(const LabelRegistry& registry, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        raise(ErrorKind::Io, "cannot open '" + path + "' for writing");
    }
    out << "address,label,source\n";
    for (const auto& [address, entry] : registry.entries) {
        out << address << ',' << (entry.label == Label::Good ? "good" : "malicious") << ','
            << entry.source << '\n';
    }
    if (!out) {
        raise(ErrorKind::Io, "failed writing '" + path + "'");
    }
}

} // namespace sift
