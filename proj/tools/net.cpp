#include "net.hpp"

#include <boost/asio.hpp>

#include <fstream>
#include <istream>
#include <memory>
#include <ostream>

#include "lorawsn/error.hpp"

namespace lorawsn::tool {

namespace asio = boost::asio;
using asio::ip::tcp;

namespace {

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, collector::Collector& collector)
      : socket_(std::move(socket)), collector_(collector) {}

  void start() { read(); }

 private:
  void read() {
    asio::async_read_until(socket_, buf_, '\n', [self = shared_from_this()](auto ec, std::size_t) {
      self->on_read(ec);
    });
  }

  void on_read(const boost::system::error_code& ec) {
    std::istream in(&buf_);
    std::string line;
    // Complete lines first; on EOF a trailing unterminated line still counts.
    while (buf_.size() > 0 && (std::getline(in, line))) {
      if (in.eof() && !ec) {
        // Partial line: put it back and wait for the rest.
        std::ostream(&buf_) << line;
        break;
      }
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      collector_.ingest_text(line);
      ++lines_;
    }
    if (!ec) {
      read();
      return;
    }
    if (ec != asio::error::eof) return;
    collector_.flush();
    reply_ = "ok " + std::to_string(lines_) + "\n";
    asio::async_write(socket_, asio::buffer(reply_), [self = shared_from_this()](auto, std::size_t) {
      boost::system::error_code ignored;
      self->socket_.shutdown(tcp::socket::shutdown_both, ignored);
    });
  }

  tcp::socket socket_;
  collector::Collector& collector_;
  asio::streambuf buf_;
  std::uint64_t lines_ = 0;
  std::string reply_;
};

void accept(tcp::acceptor& acceptor, collector::Collector& collector) {
  acceptor.async_accept([&acceptor, &collector](boost::system::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<Session>(std::move(socket), collector)->start();
    accept(acceptor, collector);
  });
}

}  // namespace

void serve(collector::Collector& collector, const ServeOptions& options, std::ostream& log) {
  asio::io_context io;
  tcp::acceptor acceptor(io);
  try {
    const tcp::endpoint endpoint(asio::ip::make_address(options.bind), options.port);
    acceptor.open(endpoint.protocol());
    acceptor.set_option(tcp::acceptor::reuse_address(true));
    acceptor.bind(endpoint);
    acceptor.listen();
  } catch (const boost::system::system_error& e) {
    throw error(error_kind::io, "cannot listen on " + options.bind + ":" +
                                    std::to_string(options.port) + ": " + e.what());
  }
  const std::uint16_t port = acceptor.local_endpoint().port();
  if (!options.port_file.empty()) {
    const auto tmp = options.port_file.string() + ".tmp";
    std::ofstream(tmp) << port << '\n';
    std::filesystem::rename(tmp, options.port_file);
  }
  log << "listening " << options.bind << ':' << port << std::endl;

  asio::signal_set signals(io, SIGINT, SIGTERM);
  signals.async_wait([&](const boost::system::error_code&, int) { io.stop(); });
  accept(acceptor, collector);
  io.run();

  collector.flush();
  log << "stopped" << std::endl;
}

std::uint64_t send_lines(std::istream& in, const std::string& host, std::uint16_t port) {
  try {
    asio::io_context io;
    tcp::resolver resolver(io);
    tcp::socket socket(io);
    asio::connect(socket, resolver.resolve(host, std::to_string(port)));

    std::uint64_t sent = 0;
    std::string chunk, line;
    while (std::getline(in, line)) {
      chunk += line;
      chunk += '\n';
      ++sent;
      if (chunk.size() > (1u << 16)) {
        asio::write(socket, asio::buffer(chunk));
        chunk.clear();
      }
    }
    asio::write(socket, asio::buffer(chunk));
    socket.shutdown(tcp::socket::shutdown_send);

    asio::streambuf reply;
    boost::system::error_code ec;
    asio::read_until(socket, reply, '\n', ec);
    std::istream r(&reply);
    std::string ok;
    std::uint64_t acked = 0;
    if (!(r >> ok >> acked) || ok != "ok")
      throw error(error_kind::io, "server closed without acknowledging");
    return sent;
  } catch (const boost::system::system_error& e) {
    throw error(error_kind::io, "cannot send to " + host + ":" + std::to_string(port) + ": " + e.what());
  }
}

}  // namespace lorawsn::tool
