#include "prevbound/csv.hpp"

#include <cstdio>
#include <memory>

namespace prevbound {

std::string read_file(const std::string& path) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "rb"),
                                                      &std::fclose);
    if (!f) throw Error(Errc::io_error, "cannot open " + path);
    std::fseek(f.get(), 0, SEEK_END);
    long size = std::ftell(f.get());
    if (size < 0) throw Error(Errc::io_error, "cannot stat " + path);
    std::fseek(f.get(), 0, SEEK_SET);
    std::string buf(static_cast<std::size_t>(size), '\0');
    if (size > 0 && std::fread(buf.data(), 1, buf.size(), f.get()) != buf.size())
        throw Error(Errc::io_error, "short read on " + path);
    return buf;
}

void write_file(const std::string& path, std::string_view content) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "wb"),
                                                      &std::fclose);
    if (!f) throw Error(Errc::io_error, "cannot open " + path + " for writing");
    if (!content.empty() &&
        std::fwrite(content.data(), 1, content.size(), f.get()) != content.size())
        throw Error(Errc::io_error, "short write on " + path);
}

}  // namespace prevbound
