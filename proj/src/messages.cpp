// Copyright 2026 The causalkv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "causalkv/messages.hpp"

#include "causalkv/json_codec.hpp"

namespace causalkv {

namespace {

struct TypeNameVisitor {
  const char* operator()(const GetReq&) const { return "GetReq"; }
  const char* operator()(const GetReply&) const { return "GetReply"; }
  const char* operator()(const PutReq&) const { return "PutReq"; }
  const char* operator()(const PutReply&) const { return "PutReply"; }
  const char* operator()(const Replicate&) const { return "Replicate"; }
  const char* operator()(const Heartbeat&) const { return "Heartbeat"; }
  const char* operator()(const Rotx&) const { return "Rotx"; }
  const char* operator()(const RotxReply&) const { return "RotxReply"; }
  const char* operator()(const SliceReq&) const { return "SliceReq"; }
  const char* operator()(const SliceReply&) const { return "SliceReply"; }
  const char* operator()(const DsvShare&) const { return "DsvShare"; }
  const char* operator()(const DsvInstall&) const { return "DsvInstall"; }
  const char* operator()(const GrPutReq&) const { return "GrPutReq"; }
  const char* operator()(const GrPutReply&) const { return "GrPutReply"; }
  const char* operator()(const GrGetReq&) const { return "GrGetReq"; }
  const char* operator()(const GrGetReply&) const { return "GrGetReply"; }
  const char* operator()(const GrReplicate&) const { return "GrReplicate"; }
  const char* operator()(const GrHeartbeat&) const { return "GrHeartbeat"; }
  const char* operator()(const GrGstShare&) const { return "GrGstShare"; }
  const char* operator()(const GrGstInstall&) const { return "GrGstInstall"; }
  const char* operator()(const GrRotx&) const { return "GrRotx"; }
  const char* operator()(const GrRotxReply&) const { return "GrRotxReply"; }
  const char* operator()(const GrSliceReq&) const { return "GrSliceReq"; }
  const char* operator()(const GrSliceReply&) const { return "GrSliceReply"; }
};

nlohmann::json vid_json(const std::optional<VersionId>& vid) {
  if (!vid) return nullptr;
  return *vid;
}

struct SummaryVisitor {
  nlohmann::json operator()(const GetReq& m) const {
    return {{"op", m.op.str()}, {"k", m.k}};
  }
  nlohmann::json operator()(const GetReply& m) const {
    return {{"op", m.op.str()}, {"ret", vid_json(m.vid)}};
  }
  nlohmann::json operator()(const PutReq& m) const {
    return {{"op", m.op.str()}, {"k", m.k}};
  }
  nlohmann::json operator()(const PutReply& m) const {
    return {{"op", m.op.str()}, {"ut", hlc_encode(m.ut)}, {"sr", m.sr}};
  }
  nlohmann::json operator()(const Replicate& m) const {
    return {{"k", m.ver.k}, {"ut", hlc_encode(m.ver.ut)}, {"sr", m.ver.sr}};
  }
  nlohmann::json operator()(const Heartbeat& m) const {
    return {{"hlc", hlc_encode(m.hlc)}};
  }
  nlohmann::json operator()(const Rotx& m) const {
    return {{"op", m.op.str()}, {"keys", m.keys}};
  }
  nlohmann::json operator()(const RotxReply& m) const {
    return {{"op", m.op.str()}};
  }
  nlohmann::json operator()(const SliceReq& m) const {
    return {{"txn", m.txn.str()}, {"k", m.k}};
  }
  nlohmann::json operator()(const SliceReply& m) const {
    return {{"txn", m.txn.str()}, {"k", m.k}, {"ret", vid_json(m.vid)}};
  }
  nlohmann::json operator()(const DsvShare& m) const {
    return {{"round", m.round}, {"v", m.vv}};
  }
  nlohmann::json operator()(const DsvInstall& m) const {
    return {{"round", m.round}, {"v", m.min_vv}};
  }
  nlohmann::json operator()(const GrPutReq& m) const {
    return {{"op", m.op.str()}, {"k", m.k}, {"dt", hlc_encode(m.dt)}};
  }
  nlohmann::json operator()(const GrPutReply& m) const {
    return {{"op", m.op.str()}, {"ut", hlc_encode(m.ut)}, {"sr", m.sr}};
  }
  nlohmann::json operator()(const GrGetReq& m) const {
    return {{"op", m.op.str()}, {"k", m.k}};
  }
  nlohmann::json operator()(const GrGetReply& m) const {
    return {{"op", m.op.str()}, {"ret", vid_json(m.vid)}};
  }
  nlohmann::json operator()(const GrReplicate& m) const {
    return {{"k", m.ver.k}, {"ut", hlc_encode(m.ver.ut)}, {"sr", m.ver.sr}};
  }
  nlohmann::json operator()(const GrHeartbeat& m) const {
    return {{"ts", hlc_encode(m.ts)}};
  }
  nlohmann::json operator()(const GrGstShare& m) const {
    return {{"round", m.round}};
  }
  nlohmann::json operator()(const GrGstInstall& m) const {
    return {{"round", m.round}, {"gst", hlc_encode(m.gst)}};
  }
  nlohmann::json operator()(const GrRotx& m) const {
    return {{"op", m.op.str()}, {"keys", m.keys}};
  }
  nlohmann::json operator()(const GrRotxReply& m) const {
    return {{"op", m.op.str()}};
  }
  nlohmann::json operator()(const GrSliceReq& m) const {
    return {{"txn", m.txn.str()}, {"k", m.k}};
  }
  nlohmann::json operator()(const GrSliceReply& m) const {
    return {{"txn", m.txn.str()}, {"k", m.k}, {"ret", vid_json(m.vid)}};
  }
};

}  // namespace

const char* message_type_name(const Message& m) { return std::visit(TypeNameVisitor{}, m); }

bool message_is_periodic(const Message& m) {
  return std::holds_alternative<Heartbeat>(m) || std::holds_alternative<DsvShare>(m) ||
         std::holds_alternative<DsvInstall>(m) || std::holds_alternative<GrHeartbeat>(m) ||
         std::holds_alternative<GrGstShare>(m) || std::holds_alternative<GrGstInstall>(m);
}

nlohmann::json message_trace_summary(const Message& m) {
  nlohmann::json j = std::visit(SummaryVisitor{}, m);
  j["type"] = message_type_name(m);
  return j;
}

}  // namespace causalkv
