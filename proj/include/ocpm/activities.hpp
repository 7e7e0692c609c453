#pragma once

#include <string>

namespace ocpm::activities {

// Activity vocabulary of the after-sales service process. Status updates are
// logged verbatim by the field application, hence the upper-case labels.
inline const std::string kSchedulerStart = "SCHEDULER START";
inline const std::string kSchedulerEnd = "SCHEDULER END";
inline const std::string kAccept = "ACCEPT";
inline const std::string kReject = "REJECT";
inline const std::string kEnroute = "ENROUTE";
inline const std::string kOnsite = "ONSITE";
inline const std::string kInprocess = "INPROCESS";
inline const std::string kHold = "HOLD";
inline const std::string kJobDone = "JOB DONE";
inline const std::string kHeadOffice = "HEAD OFFICE";
inline const std::string kArriveOffice = "ARRIVE OFFICE";
inline const std::string kJobClosed = "JOB CLOSED";
inline const std::string kSurveySent = "SURVEY SENT";

// The two analyzed object types.
inline const std::string kScheduleType = "schedule";
inline const std::string kTechnicianType = "technician";

} // namespace ocpm::activities
