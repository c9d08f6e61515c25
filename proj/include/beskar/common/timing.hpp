#pragma once
#include <cstdint>
#include <ctime>

namespace beskar {

// CPU time consumed by the calling thread, in microseconds. Used instead of
// wall-clock so that measurements of one entity are not polluted by
// scheduling noise from the rest of the process.
inline double
thread_cpu_us()
{
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) * 1e6 + static_cast<double>(ts.tv_nsec) / 1e3;
}

class cpu_stopwatch
{
public:
  cpu_stopwatch()
    : start_(thread_cpu_us())
  {
  }
  double elapsed_us() const { return thread_cpu_us() - start_; }

private:
  double start_;
};

}
