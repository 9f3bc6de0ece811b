#include <pthread.h>

#include <iostream>
#include <string>
#include <vector>

#include "copro/cli.hpp"

namespace {

struct Job {
    std::vector<std::string> args;
    int code = 3;
};

void* work(void* p) {
    auto* job = static_cast<Job*>(p);
    job->code = copro::cli::run(job->args, std::cout, std::cerr);
    return nullptr;
}

}  // namespace

int main(int argc, char** argv) {
    Job job;
    job.args.assign(argv + 1, argv + argc);

    // deep lazy structures force recursively, so run on a large stack
    pthread_attr_t attr;
    pthread_attr_init(&attr);
    pthread_attr_setstacksize(&attr, std::size_t{512} << 20);
    pthread_t th;
    if (pthread_create(&th, &attr, work, &job) != 0) {
        work(&job);
    } else {
        pthread_join(th, nullptr);
    }
    pthread_attr_destroy(&attr);
    std::cout.flush();
    return job.code;
}
