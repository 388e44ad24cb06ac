#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hdlss/classify.hpp"
#include "hdlss/core.hpp"
#include "hdlss/registration.hpp"
#include "hdlss/types.hpp"

namespace hdlss {

namespace io_detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s, const std::string& context) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw Error(ErrorKind::Io, context + ": cannot parse number '" + s + "'");
    return v;
}

// Reads one whitespace-delimited PNM header token, skipping '#' comments.
inline std::string pnm_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace io_detail

/// Binary PGM (P5, maxval 255). Header comments are accepted on read.
inline GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "read_pgm: cannot open '" + path + "'");

    std::string magic = io_detail::pnm_token(in);
    if (magic != "P5")
        throw Error(ErrorKind::Io, "read_pgm: wrong magic '" + magic + "' in '" + path + "'");
    std::string ws = io_detail::pnm_token(in);
    std::string hs = io_detail::pnm_token(in);
    std::string ms = io_detail::pnm_token(in);
    int width = 0, height = 0, maxval = 0;
    try {
        width = std::stoi(ws);
        height = std::stoi(hs);
        maxval = std::stoi(ms);
    } catch (const std::exception&) {
        throw Error(ErrorKind::Io, "read_pgm: malformed header in '" + path + "'");
    }
    if (width < 1 || height < 1)
        throw Error(ErrorKind::Io, "read_pgm: bad dimensions in '" + path + "'");
    if (maxval != 255)
        throw Error(ErrorKind::Io,
                    "read_pgm: unsupported maxval " + std::to_string(maxval) + " in '" + path +
                        "' (only 255)");
    // the single whitespace byte after maxval was consumed by the tokenizer

    std::vector<unsigned char> bytes(static_cast<size_t>(width) * height);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<size_t>(in.gcount()) != bytes.size())
        throw Error(ErrorKind::Io, "read_pgm: truncated pixel data in '" + path + "' (expected " +
                                       std::to_string(bytes.size()) + " bytes, got " +
                                       std::to_string(in.gcount()) + ")");

    GrayImage img(height, width);
    size_t at = 0;
    for (int i = 1; i <= height; ++i)
        for (int j = 1; j <= width; ++j) img.at(i, j) = static_cast<double>(bytes[at++]);
    return img;
}

inline void write_pgm(const std::string& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "write_pgm: cannot open '" + path + "'");
    out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
    std::vector<unsigned char> bytes;
    bytes.reserve(static_cast<size_t>(img.rows()) * img.cols());
    for (int i = 1; i <= img.rows(); ++i)
        for (int j = 1; j <= img.cols(); ++j) {
            double v = std::clamp(img.at(i, j), 0.0, 255.0);
            bytes.push_back(static_cast<unsigned char>(std::lround(v)));
        }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "write_pgm: write failed for '" + path + "'");
}

/// Binary PPM (P6) for the heatmap output.
inline void write_ppm(const std::string& path, const RgbImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "write_ppm: cannot open '" + path + "'");
    out << "P6\n" << img.cols << " " << img.rows << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
    if (!out) throw Error(ErrorKind::Io, "write_ppm: write failed for '" + path + "'");
}

/// One image entry of a dataset manifest.
struct ManifestRecord {
    std::string id;
    std::string file;  // relative to the manifest's directory
    int label = 0;     // +1 male, -1 female
    LandmarkSet landmarks;
};

/// Comma-separated dataset description. Header row is fixed:
/// id,file,label,x1,y1,x2,y2,x3,y3 with label in {+1,-1} or {male,female}
/// and landmarks as (x=col, y=row) 1-based pixel coordinates. An optional
/// comment line "# image <rows> <cols>" declares the image dimensions.
struct DatasetManifest {
    std::filesystem::path directory;
    std::vector<ManifestRecord> records;
    int rows = 0;  // 0 = not declared, inferred at load
    int cols = 0;
};

inline int parse_label_token(const std::string& tok) {
    if (tok == "male" || tok == "+1" || tok == "1") return 1;
    if (tok == "female" || tok == "-1") return -1;
    throw Error(ErrorKind::Data, "unknown label token '" + tok + "'");
}

inline DatasetManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "read_manifest: cannot open '" + path + "'");

    DatasetManifest man;
    man.directory = std::filesystem::path(path).parent_path();

    std::string line;
    bool saw_header = false;
    long row_no = 0;
    std::vector<std::string> seen_ids;
    while (std::getline(in, line)) {
        ++row_no;
        io_detail::strip_cr(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream cs(line.substr(1));
            std::string word;
            if (cs >> word && word == "image") {
                if (!(cs >> man.rows >> man.cols) || man.rows < 1 || man.cols < 1)
                    throw Error(ErrorKind::Data, "read_manifest: bad '# image' line");
            }
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (line.back() == ',') fields.push_back("");

        if (!saw_header) {
            if (line != "id,file,label,x1,y1,x2,y2,x3,y3")
                throw Error(ErrorKind::Data,
                            "read_manifest: expected header 'id,file,label,x1,y1,x2,y2,x3,y3', "
                            "got '" + line + "'");
            saw_header = true;
            continue;
        }

        std::string where = "row " + std::to_string(row_no);
        if (fields.size() != 9)
            throw Error(ErrorKind::Data, "read_manifest: " + where + ": expected 9 fields, got " +
                                             std::to_string(fields.size()));
        ManifestRecord rec;
        rec.id = fields[0];
        rec.file = fields[1];
        try {
            rec.label = parse_label_token(fields[2]);
        } catch (const Error& e) {
            throw Error(ErrorKind::Data, "read_manifest: " + where + ": " + e.what());
        }
        for (int k = 0; k < 3; ++k) {
            double x = io_detail::parse_double(fields[3 + 2 * k], "read_manifest: " + where);
            double y = io_detail::parse_double(fields[4 + 2 * k], "read_manifest: " + where);
            rec.landmarks.push_back(Eigen::Vector2d(x, y));
        }
        if (std::find(seen_ids.begin(), seen_ids.end(), rec.id) != seen_ids.end())
            throw Error(ErrorKind::Data, "read_manifest: duplicate id '" + rec.id + "'");
        seen_ids.push_back(rec.id);
        man.records.push_back(std::move(rec));
    }
    if (!saw_header) throw Error(ErrorKind::Data, "read_manifest: missing header row");
    return man;
}

inline void write_manifest(const std::string& path, const DatasetManifest& man) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "write_manifest: cannot open '" + path + "'");
    if (man.rows > 0 && man.cols > 0) out << "# image " << man.rows << " " << man.cols << "\n";
    out << "id,file,label,x1,y1,x2,y2,x3,y3\n";
    for (const auto& rec : man.records) {
        out << rec.id << "," << rec.file << "," << (rec.label == 1 ? "+1" : "-1");
        for (const auto& p : rec.landmarks)
            out << "," << io_detail::format_double(p[0]) << "," << io_detail::format_double(p[1]);
        out << "\n";
    }
}

struct LoadedDataset {
    std::vector<std::string> ids;
    std::vector<GrayImage> images;
    std::vector<LandmarkSet> landmarks;
    Eigen::VectorXi labels;
    int rows = 0;
    int cols = 0;
};

/// Loads every image named by the manifest, in row order, and validates the
/// declared dimensions.
inline LoadedDataset load_dataset(const DatasetManifest& man) {
    if (man.records.empty()) throw Error(ErrorKind::Data, "load_dataset: empty manifest");
    LoadedDataset out;
    out.rows = man.rows;
    out.cols = man.cols;
    out.labels.resize(static_cast<Eigen::Index>(man.records.size()));
    Eigen::Index k = 0;
    for (const auto& rec : man.records) {
        std::filesystem::path p = man.directory / rec.file;
        if (!std::filesystem::exists(p))
            throw Error(ErrorKind::Data,
                        "load_dataset: missing file '" + p.string() + "' for id '" + rec.id + "'");
        GrayImage img = read_pgm(p.string());
        if (out.rows == 0) {
            out.rows = img.rows();
            out.cols = img.cols();
        }
        if (img.rows() != out.rows || img.cols() != out.cols)
            throw Error(ErrorKind::Data, "load_dataset: image '" + rec.id + "' is " +
                                             std::to_string(img.rows()) + "x" +
                                             std::to_string(img.cols()) + ", expected " +
                                             std::to_string(out.rows) + "x" +
                                             std::to_string(out.cols));
        out.ids.push_back(rec.id);
        out.images.push_back(std::move(img));
        out.landmarks.push_back(rec.landmarks);
        out.labels[k++] = rec.label;
    }
    return out;
}

/// Column-stacks the rasterized images into a labeled dataset.
inline LabeledDataset to_dataset(const std::vector<GrayImage>& images,
                                 const Eigen::VectorXi& labels) {
    if (images.empty()) throw Error(ErrorKind::Data, "to_dataset: no images");
    Eigen::Index d = static_cast<Eigen::Index>(images[0].rows()) * images[0].cols();
    Eigen::MatrixXd data(d, static_cast<Eigen::Index>(images.size()));
    for (size_t k = 0; k < images.size(); ++k) {
        Eigen::VectorXd v = rasterize(images[k]);
        if (v.size() != d) throw Error(ErrorKind::Dimension, "to_dataset: image sizes differ");
        data.col(static_cast<Eigen::Index>(k)) = v;
    }
    return LabeledDataset(std::move(data), labels);
}

/// LinearRule plus the image shape it was trained on (0x0 when the data
/// was not image-shaped).
struct SavedModel {
    LinearRule rule;
    int image_rows = 0;
    int image_cols = 0;
};

/// Line-oriented text model format, version 1. Reals carry 17 significant
/// digits so a save/load round trip reproduces every score bit-exactly.
inline void save_model(const std::string& path, const LinearRule& rule, int image_rows = 0,
                       int image_cols = 0) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "save_model: cannot open '" + path + "'");
    out << "HDLSSD 1\n";
    out << "method: " << method_name(rule.method) << "\n";
    out << "d: " << rule.w.size() << "\n";
    if (image_rows > 0 && image_cols > 0)
        out << "image: " << image_rows << " " << image_cols << "\n";
    out << "intercept: " << io_detail::format_double(rule.b) << "\n";
    out << "meta:";
    if (rule.C > 0.0) out << " C=" << io_detail::format_double(rule.C);
    out << " n=" << rule.n << " n1=" << rule.n1 << " n2=" << rule.n2;
    if (rule.mask)
        out << " mask=" << rule.mask->row_min << "," << rule.mask->row_max << ","
            << rule.mask->col_min << "," << rule.mask->col_max;
    out << "\n";
    out << "w:\n";
    for (Eigen::Index i = 0; i < rule.w.size(); ++i)
        out << io_detail::format_double(rule.w[i]) << "\n";
    if (!out) throw Error(ErrorKind::Io, "save_model: write failed for '" + path + "'");
}

inline SavedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "load_model: cannot open '" + path + "'");

    auto next_line = [&](std::string& line) {
        if (!std::getline(in, line)) return false;
        io_detail::strip_cr(line);
        return true;
    };

    std::string line;
    if (!next_line(line) || line != "HDLSSD 1")
        throw Error(ErrorKind::Io, "load_model: version mismatch (expected 'HDLSSD 1')");

    SavedModel model;
    Eigen::Index d = -1;
    bool have_w = false;
    while (next_line(line)) {
        if (line == "w:") {
            have_w = true;
            break;
        }
        auto colon = line.find(':');
        if (colon == std::string::npos)
            throw Error(ErrorKind::Io, "load_model: malformed line '" + line + "'");
        std::string key = line.substr(0, colon);
        std::string value = line.substr(colon + 1);
        if (!value.empty() && value.front() == ' ') value.erase(0, 1);

        if (key == "method") {
            model.rule.method = method_from_name(value);
        } else if (key == "d") {
            d = std::stol(value);
        } else if (key == "image") {
            std::istringstream ss(value);
            if (!(ss >> model.image_rows >> model.image_cols))
                throw Error(ErrorKind::Io, "load_model: malformed image line");
        } else if (key == "intercept") {
            model.rule.b = io_detail::parse_double(value, "load_model intercept");
        } else if (key == "meta") {
            std::istringstream ss(value);
            std::string kv;
            while (ss >> kv) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                std::string mk = kv.substr(0, eq), mv = kv.substr(eq + 1);
                if (mk == "C")
                    model.rule.C = io_detail::parse_double(mv, "load_model meta C");
                else if (mk == "n")
                    model.rule.n = std::stol(mv);
                else if (mk == "n1")
                    model.rule.n1 = std::stol(mv);
                else if (mk == "n2")
                    model.rule.n2 = std::stol(mv);
                else if (mk == "mask") {
                    MaskRect r;
                    if (std::sscanf(mv.c_str(), "%d,%d,%d,%d", &r.row_min, &r.row_max, &r.col_min,
                                    &r.col_max) != 4)
                        throw Error(ErrorKind::Io, "load_model: malformed mask meta");
                    model.rule.mask = r;
                }
                // unknown meta keys are ignored
            }
        } else {
            throw Error(ErrorKind::Io, "load_model: unknown key '" + key + "'");
        }
    }
    if (!have_w || d < 0)
        throw Error(ErrorKind::Io, "load_model: missing d or w section");

    std::vector<double> values;
    while (next_line(line)) {
        if (line.empty()) continue;
        values.push_back(io_detail::parse_double(line, "load_model w"));
    }
    if (static_cast<Eigen::Index>(values.size()) != d)
        throw Error(ErrorKind::Io, "load_model: d is " + std::to_string(d) + " but " +
                                       std::to_string(values.size()) + " values follow");
    model.rule.w = Eigen::Map<Eigen::VectorXd>(values.data(), d);
    return model;
}

}  // namespace hdlss
