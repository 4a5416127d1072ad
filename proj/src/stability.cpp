#include "persuasion/stability.hpp"

namespace persuasion {

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::Public: return "public";
    case Channel::SemiPrivate: return "semi-private";
    case Channel::Private: return "private";
  }
  return "?";
}

Channel channel_from_string(const std::string& s) {
  if (s == "public" || s == "pub") return Channel::Public;
  if (s == "semi-private" || s == "semi" || s == "sm") return Channel::SemiPrivate;
  if (s == "private" || s == "pv") return Channel::Private;
  throw ModelError(Errc::FormatError, "unknown channel '" + s + "'");
}

AgentView view_of(const MetaSignal& s, int agent, Channel channel) {
  AgentView v;
  v.channel = channel;
  v.agent = agent;
  switch (channel) {
    case Channel::Public:
      v.rec_part = s.rec;
      v.labels = s.labels;
      break;
    case Channel::SemiPrivate:
      v.rec_part = s.rec;
      v.labels = {s.labels[agent]};
      break;
    case Channel::Private:
      v.rec_part = {s.rec[agent]};
      v.labels = {s.labels[agent]};
      break;
  }
  return v;
}

}  // namespace persuasion
